"""Certified two-sided bounds on the measure of balls and intervals.

For a self-similar measure mu = sum_w p_w mu o S_w^{-1} over any cross-section
of words, a word whose image sits inside a closed set E contributes its full
mass to mu(E), a disjoint word contributes nothing and every other word
contributes something in [0, p_w]. Summing over the cross-section at scale
lam**k gives the bracket; deeper cross-sections refine it monotonically.

The Moran measure on the middle-third Cantor set is handled separately, with
level-dependent branch weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from gmpy2 import mpq

from .field import Number, Q
from .ifs import BudgetExceeded, WeightedIFS
from .net import NetInterval

DEFAULT_ORACLE_BUDGET = 2_000_000


@dataclass(frozen=True)
class MeasureBounds:
    lower: object
    upper: object
    depth: int

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, other: "MeasureBounds") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper


def interval_bounds(
    ifs: WeightedIFS, lo: Number, hi: Number, depth: int, budget: int = DEFAULT_ORACLE_BUDGET
) -> MeasureBounds:
    """Bounds on mu([lo, hi]) from the cross-section at scale lam**depth.

    Images inside [lo, hi] count on both sides and images that cross the
    boundary count toward the upper bound only. An image meeting [lo, hi] in
    a single endpoint is dropped: the measure has no atoms, so that contact
    carries zero mass. Words with identical images are merged, which keeps
    exact overlaps from multiplying the work.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    thr = ifs.lam_pow(depth)
    lower = mpq(0)
    upper = mpq(0)
    frontier: dict = {(mpq(0), mpq(1)): mpq(1)}
    visited = 0
    while frontier:
        nxt: dict = {}
        for (a, r), mass in frontier.items():
            visited += 1
            b = a + r
            if b <= lo or a >= hi:
                continue
            if lo <= a and b <= hi:
                lower += mass
                upper += mass
                continue
            if r <= thr:
                upper += mass
                continue
            for rj, dj, pj in zip(ifs.ratios, ifs.translations, ifs.probs):
                key = (a + r * dj, r * rj)
                nxt[key] = nxt.get(key, 0) + mass * pj
        frontier = nxt
        if visited > budget and frontier:
            # everything still pending may or may not meet [lo, hi]
            pending = sum(frontier.values(), mpq(0))
            partial = MeasureBounds(lower, upper + pending, depth)
            raise BudgetExceeded(f"oracle budget {budget} exceeded at depth {depth}", budget, partial)
    return MeasureBounds(lower, upper, depth)


def mu_ball(ifs: WeightedIFS, x: Number, r: Number, depth: int, budget: int = DEFAULT_ORACLE_BUDGET) -> MeasureBounds:
    """Bounds on mu of the closed ball B(x, r)."""
    if r <= 0:
        raise ValueError("radius must be positive")
    return interval_bounds(ifs, x - r, x + r, depth, budget)


def mu_net_interval(
    ifs: WeightedIFS, delta: NetInterval, depth: int | None = None, budget: int = DEFAULT_ORACLE_BUDGET
) -> MeasureBounds:
    if depth is None:
        depth = delta.level + 10
    return interval_bounds(ifs, delta.left, delta.right, depth, budget)


def refine(
    compute: Callable[[int], MeasureBounds],
    start: int,
    max_depth: int,
    rel_tol=mpq(1, 1000),
) -> MeasureBounds:
    """Double the depth until upper - lower <= rel_tol * lower or ``max_depth`` is reached."""
    depth = max(start, 1)
    best = compute(depth)
    while best.width > rel_tol * best.lower and depth < max_depth:
        depth = min(2 * depth, max_depth)
        try:
            best = compute(depth)
        except BudgetExceeded:
            break
    return best


def certified_ball(
    ifs: WeightedIFS,
    x: Number,
    r: Number,
    start: int,
    max_depth: int = 256,
    budget: int = DEFAULT_ORACLE_BUDGET,
) -> MeasureBounds:
    return refine(lambda k: mu_ball(ifs, x, r, k, budget), start, max_depth)


def certified_interval(
    ifs: WeightedIFS, lo: Number, hi: Number, start: int, max_depth: int = 256, budget: int = DEFAULT_ORACLE_BUDGET
) -> MeasureBounds:
    return refine(lambda k: interval_bounds(ifs, lo, hi, k, budget), start, max_depth)


# ---------------------------------------------------------------- Moran measure


@dataclass(frozen=True)
class Override:
    index_rule: str
    pair: tuple

    def applies(self, n: int) -> bool:
        if self.index_rule == "powers_of_2":
            return n >= 1 and n & (n - 1) == 0
        if self.index_rule.startswith("set:"):
            return n in {int(v) for v in self.index_rule[4:].split(",") if v}
        raise ValueError(f"unknown index rule {self.index_rule!r}")


class MoranMeasure:
    """Product measure on the middle-third Cantor set with weights chosen per level."""

    def __init__(self, default: Sequence = ("1/3", "2/3"), overrides: Sequence[Override] = (), name: str | None = None):
        self.default = self._pair(default)
        self.overrides = tuple(Override(o.index_rule, self._pair(o.pair)) for o in overrides)
        self.name = name
        self._cache: dict[int, tuple] = {}

    @staticmethod
    def _pair(pair) -> tuple:
        p0, p1 = (Q(v) for v in pair)
        if p0 <= 0 or p1 <= 0 or p0 + p1 != 1:
            raise ValueError(f"level weights {p0}, {p1} must be positive and sum to 1")
        return p0, p1

    def weights(self, n: int) -> tuple:
        hit = self._cache.get(n)
        if hit is None:
            hit = self.default
            for o in self.overrides:
                if o.applies(n):
                    hit = o.pair
            self._cache[n] = hit
        return hit

    def interval_mass(self, omega: Sequence[int]) -> Number:
        acc = mpq(1)
        for i, bit in enumerate(omega, start=1):
            acc *= self.weights(i)[bit]
        return acc

    def describe(self) -> dict:
        return {
            "moran": {
                "default": [str(v) for v in self.default],
                "overrides": [{"index_rule": o.index_rule, "pair": [str(v) for v in o.pair]} for o in self.overrides],
            }
        }


@dataclass(frozen=True)
class MoranValue:
    lower: object
    upper: object
    exact: bool
    depth: int

    @property
    def value(self):
        if not self.exact:
            raise ValueError("decomposition did not terminate; only bounds are available")
        return self.lower


def moran_interval(measure: MoranMeasure, lo, hi, max_depth: int = 400) -> MoranValue:
    """Measure of the closed interval [lo, hi].

    Points carry no mass, so a Cantor interval meeting [lo, hi] in a single
    point is dropped. The recursion ends once no construction interval
    straddles an endpoint; otherwise it stops at ``max_depth`` with bounds.
    """
    lo, hi = Q(lo), Q(hi)
    lower = mpq(0)
    frontier = [(mpq(0), mpq(1), mpq(1))]  # (left, length, mass)
    level = 0
    while frontier and level < max_depth:
        nxt = []
        level += 1
        p0, p1 = measure.weights(level)
        for a, length, mass in frontier:
            third = length / 3
            for left, w in ((a, p0), (a + 2 * third, p1)):
                right = left + third
                if right <= lo or left >= hi:
                    continue
                if lo <= left and right <= hi:
                    lower += mass * w
                else:
                    nxt.append((left, third, mass * w))
        frontier = nxt
    pending = sum((m for _, _, m in frontier), mpq(0))
    return MoranValue(lower, lower + pending, not frontier, level)


def moran_mu_ball(measure: MoranMeasure, x, r, max_depth: int = 400) -> MoranValue:
    x, r = Q(x), Q(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    if r >= 1 and 0 <= x <= 1:
        return MoranValue(mpq(1), mpq(1), True, 0)
    return moran_interval(measure, x - r, x + r, max_depth)
