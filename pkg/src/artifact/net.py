"""Net intervals: the level-n partition of [0, 1] cut out by the endpoints S_u(0), S_u(1).

Children are built lazily by extending the covering words of their parent,
so a single descending chain can be followed to large depth without
materialising whole levels.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Iterator

from gmpy2 import mpq

from .field import Number
from .ifs import BudgetExceeded, WeightedIFS

DEFAULT_INTERVAL_BUDGET = 2_000_000


class NetInterval:
    """One net interval.

    ``neighbors`` holds ``(position, ratio, mass)`` triples for the distinct
    covering maps S_u, ordered by ``(left - position, ratio)``. ``transfer``
    is the matrix carrying the parent's neighbor masses to this interval's
    (rows follow the parent's neighbor order).
    """

    __slots__ = ("level", "left", "right", "neighbors", "parent", "index", "transfer", "_children", "_pn")

    def __init__(self, level, left, right, neighbors, parent=None, index=0, transfer=None):
        self.level = level
        self.left = left
        self.right = right
        self.neighbors = neighbors
        self.parent = parent
        self.index = index
        self.transfer = transfer
        self._children = None
        self._pn = None

    @property
    def is_gap(self) -> bool:
        return not self.neighbors

    @property
    def length(self) -> Number:
        return self.right - self.left

    @property
    def p_n(self):
        """Total mass of the covering words (0 for a gap)."""
        if self._pn is None:
            self._pn = sum((m for _, _, m in self.neighbors), mpq(0))
        return self._pn

    @property
    def masses(self) -> tuple:
        return tuple(m for _, _, m in self.neighbors)

    def path(self) -> tuple:
        """Child indices from the root down to this interval."""
        out = []
        node = self
        while node.parent is not None:
            out.append(node.index)
            node = node.parent
        return tuple(reversed(out))

    def contains(self, x) -> bool:
        return self.left <= x <= self.right

    def __repr__(self) -> str:
        tag = " gap" if self.is_gap else ""
        return f"NetInterval(n={self.level}, [{self.left}, {self.right}], P={self.p_n}{tag})"


def p_n(delta: NetInterval):
    """(P_n(delta), is_gap)."""
    return delta.p_n, delta.is_gap


class NetTree:
    def __init__(self, ifs: WeightedIFS, interval_budget: int = DEFAULT_INTERVAL_BUDGET):
        self.ifs = ifs
        self.interval_budget = interval_budget
        self.created = 1
        self.root = NetInterval(0, mpq(0), mpq(1), ((mpq(0), mpq(1), mpq(1)),))
        self._levels: list[list[NetInterval]] = [[self.root]]

    # ------------------------------------------------------------ children
    def children(self, delta: NetInterval) -> list[NetInterval]:
        if delta._children is None:
            delta._children = self._build_children(delta)
        return delta._children

    def _build_children(self, delta: NetInterval) -> list[NetInterval]:
        n1 = delta.level + 1
        if delta.is_gap:
            kids = [NetInterval(n1, delta.left, delta.right, (), delta, 0, ())]
            self._count(1)
            return kids
        ifs = self.ifs
        thr = ifs.lam_pow(n1)
        # (position, ratio) -> {parent index: summed p_w}
        cands: dict = {}
        for i, (a, r, _m) in enumerate(delta.neighbors):
            for _w, rw, pw, aw in ifs.extension_words(r / thr):
                key = (a + r * aw, r * rw)
                row = cands.setdefault(key, {})
                row[i] = row.get(i, 0) + pw
        lo, hi = delta.left, delta.right
        cuts = {lo, hi}
        for a, r in cands:
            if lo < a < hi:
                cuts.add(a)
            b = a + r
            if lo < b < hi:
                cuts.add(b)
        pts = sorted(cuts)
        rows = len(delta.neighbors)
        masses = delta.masses
        kids = []
        for idx, (x0, x1) in enumerate(zip(pts, pts[1:])):
            cover = [(x0 - a, r, a) for (a, r) in cands if a <= x0 and a + r >= x1]
            cover.sort(key=lambda t: (t[0], t[1]))
            nbrs = []
            cols = []
            for _off, r, a in cover:
                contrib = cands[(a, r)]
                mass = sum((masses[i] * pw for i, pw in contrib.items()), mpq(0))
                nbrs.append((a, r, mass))
                cols.append(contrib)
            transfer = tuple(tuple(col.get(i, mpq(0)) for col in cols) for i in range(rows))
            kids.append(NetInterval(n1, x0, x1, tuple(nbrs), delta, idx, transfer))
        self._count(len(kids))
        return kids

    def _count(self, k: int) -> None:
        self.created += k
        if self.created > self.interval_budget:
            raise BudgetExceeded(f"net-interval budget {self.interval_budget} exceeded", self.interval_budget)

    # ------------------------------------------------------------ levels
    def level(self, n: int) -> list[NetInterval]:
        """All level-n intervals, left to right."""
        while len(self._levels) <= n:
            prev = self._levels[-1]
            nxt: list[NetInterval] = []
            for d in prev:
                nxt.extend(self.children(d))
            self._levels.append(nxt)
        return self._levels[n]

    def build_level(self, n: int) -> "NetTree":
        self.level(n)
        return self

    def built_levels(self) -> int:
        return len(self._levels) - 1

    def iter_levels(self, upto: int) -> Iterator[list[NetInterval]]:
        for n in range(upto + 1):
            yield self.level(n)

    # ------------------------------------------------------------ navigation
    def locate(self, x, n: int) -> NetInterval:
        """Level-n interval containing x; shared endpoints go to the interval on their right."""
        if not (0 <= x <= 1):
            raise ValueError("x must lie in [0, 1]")
        node = self.root
        for _ in range(n):
            kids = self.children(node)
            if x >= node.right:  # only possible for x == 1
                node = kids[-1]
                continue
            lefts = [k.left for k in kids]
            node = kids[bisect_right(lefts, x) - 1]
        return node

    def locate_both(self, x, n: int) -> list[NetInterval]:
        """Every level-n interval containing x (two when x is a shared endpoint)."""
        right = self.locate(x, n)
        out = [right]
        if x == right.left and x > 0:
            left = self.adjacent(right, -1)
            if left is not None:
                out.insert(0, left)
        return out

    def descend(self, path) -> NetInterval:
        node = self.root
        for i in path:
            kids = self.children(node)
            if not 0 <= i < len(kids):
                raise IndexError(f"child index {i} out of range at level {node.level}")
            node = kids[i]
        return node

    def adjacent(self, delta: NetInterval, side: int) -> NetInterval | None:
        """Neighbouring interval of the same level (side -1 = left, +1 = right)."""
        if delta.parent is None:
            return None
        sibs = self.children(delta.parent)
        j = delta.index + side
        if 0 <= j < len(sibs):
            return sibs[j]
        outer = self.adjacent(delta.parent, side)
        if outer is None:
            return None
        kids = self.children(outer)
        return kids[-1] if side < 0 else kids[0]

    def flanks(self, delta: NetInterval):
        """(left flank, right flank) as lists of intervals; ``None`` for an absent side.

        Each flank is the union of the two adjacent intervals on that side, cut
        short to the single edge interval when only one exists.
        """
        return self._flank(delta, -1), self._flank(delta, +1)

    def _flank(self, delta: NetInterval, side: int):
        first = self.adjacent(delta, side)
        if first is None:
            return None
        second = self.adjacent(first, side)
        if second is None:
            return [first]
        return [second, first] if side < 0 else [first, second]


def flank_span(parts) -> tuple | None:
    if parts is None:
        return None
    return parts[0].left, parts[-1].right
