"""Endpoint-gap statistics per level and the separation diagnostics built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .field import Number, literal, to_float
from .finite_type import TransitionGraph, vertex_levels
from .ifs import DEFAULT_WORD_BUDGET, BudgetExceeded, WeightedIFS
from .net import NetTree


def image_keys(ifs: WeightedIFS, depth: int, budget: int = DEFAULT_WORD_BUDGET):
    """Yield, for n = 1..depth, the distinct (S_u(0), r_u) pairs over the level-n cross-section."""
    if ifs.equicontractive and ifs.field.is_rational:
        # integer positions S_u(0) * beta**(n-1) * E, with lam = alpha/beta and E clearing the d_j
        alpha, beta = int(ifs.lam.numerator), int(ifs.lam.denominator)
        E = math.lcm(*(int(d.denominator) for d in ifs.translations))
        steps = [int(d * E) for d in ifs.translations]
        ipos = {0}
        for n in range(1, depth + 1):
            if n == 1:
                ipos = set(steps)
            else:
                an = alpha ** (n - 1)
                shifts = [s * an for s in steps]
                ipos = {p * beta + s for p in ipos for s in shifts}
            if len(ipos) > budget:
                raise BudgetExceeded(f"more than {budget} distinct images at level {n}", budget)
            yield n, _ScaledPositions(ipos, mpq(1, beta ** (n - 1) * E), ifs.lam_pow(n))
        return
    if ifs.equicontractive:
        # one ratio per level, so positions alone identify an image
        pos = {mpq(0)}
        for n in range(1, depth + 1):
            r = ifs.lam_pow(n - 1)
            shifts = [r * d for d in ifs.translations]
            pos = {a + s for a in pos for s in shifts}
            if len(pos) > budget:
                raise BudgetExceeded(f"more than {budget} distinct images at level {n}", budget)
            rn = ifs.lam_pow(n)
            yield n, [(a, rn) for a in pos]
        return
    keys = {(mpq(0), mpq(1))}
    for n in range(1, depth + 1):
        thr = ifs.lam_pow(n)
        nxt = set()
        for a, r in keys:
            for _w, rw, _pw, aw in ifs.extension_words(r / thr):
                nxt.add((a + r * aw, r * rw))
        if len(nxt) > budget:
            raise BudgetExceeded(f"more than {budget} distinct images at level {n}", budget)
        keys = nxt
        yield n, keys


class _ScaledPositions:
    """Distinct left endpoints stored as integers times a common scale (equal ratios)."""

    def __init__(self, ints, scale, ratio):
        self.ints = ints
        self.scale = scale
        self.ratio = ratio

    def __len__(self) -> int:
        return len(self.ints)


def _level_min_gap(keys) -> Number:
    if isinstance(keys, _ScaledPositions):
        vals = sorted(keys.ints)
        # right endpoints are a fixed shift of left ones, so one gap set suffices
        return min(v - u for u, v in zip(vals, vals[1:])) * keys.scale
    gaps = [g for g in (_min_gap({a for a, _ in keys}), _min_gap({a + r for a, r in keys})) if g is not None]
    return min(gaps)


def _min_gap(values) -> Number | None:
    vals = sorted(values)
    best = None
    for u, v in zip(vals, vals[1:]):
        d = v - u
        if best is None or d < best:
            best = d
    return best


@dataclass
class GapReport:
    lam: Number
    a: list = field(default_factory=list)  # a[n-1] = a_n
    f: list = field(default_factory=list)
    kappa: list = field(default_factory=list)
    g: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.a)

    def rows(self) -> list[dict]:
        out = []
        for i in range(self.depth):
            bound = awsc_bound(self.lam, self.f[i])
            out.append(
                {
                    "n": i + 1,
                    "a_n": literal(self.a[i]),
                    "f_n": literal(self.f[i]),
                    "kappa_n": self.kappa[i],
                    "g_n": self.g[i],
                    "awsc_bound": literal(bound),
                    "margin": literal(bound - self.g[i]),
                }
            )
        return out


def kappa_for(lam: Number, f_n: Number) -> int:
    k = 0
    acc: Number = mpq(1)
    while acc > f_n:
        acc = acc * lam
        k += 1
    return k


def neighbor_counts(tree: NetTree, depth: int, graph: TransitionGraph | None = None) -> list[int]:
    """g(n) for n = 1..depth, read from a closed graph when available."""
    if graph is not None and graph.closed:
        levels = vertex_levels(graph, depth)
        return [max(len(graph.vectors[v].neighbors) for v in levels[n]) for n in range(1, depth + 1)]
    return [max(len(d.neighbors) for d in tree.level(n)) for n in range(1, depth + 1)]


def gap_report(
    ifs: WeightedIFS,
    tree: NetTree,
    depth: int,
    graph: TransitionGraph | None = None,
    budget: int = DEFAULT_WORD_BUDGET,
) -> GapReport:
    rep = GapReport(ifs.lam)
    running = ifs.lam
    try:
        for n, keys in image_keys(ifs, depth, budget):
            a_n = _level_min_gap(keys) / ifs.lam_pow(n)
            rep.a.append(a_n)
            if a_n < running:
                running = a_n
            rep.f.append(running)
            rep.kappa.append(kappa_for(ifs.lam, running))
    except BudgetExceeded as exc:
        # keep what was computed so callers can report it as partial
        rep.g = neighbor_counts(tree, rep.depth, graph) if rep.depth else []
        exc.partial = rep
        raise
    rep.g = neighbor_counts(tree, depth, graph)
    return rep


@dataclass(frozen=True)
class WSCVerdict:
    satisfied: bool
    a_inf: Number
    depth: int
    sequence: tuple

    def describe(self) -> str:
        if self.satisfied:
            return f"SatisfiedUpToDepth({literal(self.a_inf)}) at depth {self.depth}"
        return f"Undetermined at depth {self.depth}"


def wsc_verdict(report: GapReport) -> WSCVerdict:
    """Stable when the last third of levels introduces no a_n value unseen before it."""
    seq = list(report.a)
    if len(seq) < 3:
        raise ValueError("need at least three levels")
    tail = max(1, math.ceil(len(seq) / 3))
    head_vals = set(seq[:-tail])
    stable = all(v in head_vals for v in seq[-tail:])
    return WSCVerdict(stable, min(seq), len(seq), tuple(seq))


def awsc_bound(lam: Number, f_n: Number) -> Number:
    q = 3 / (lam * f_n)
    return q * q


def awsc_bound_check(report: GapReport, lam: Number | None = None) -> list[tuple[bool, Number]]:
    """Per level: (g(n) <= (3/(lam f(n)))**2, margin)."""
    lam = report.lam if lam is None else lam
    out = []
    for g_n, f_n in zip(report.g, report.f):
        bound = awsc_bound(lam, f_n)
        out.append((g_n <= bound, bound - g_n))
    return out


def kappa_ratio_bounds(report: GapReport) -> list[tuple[int, float]]:
    """(kappa_n, |log f(n)|/|log lam| + 1) pairs for the sub-linear growth check."""
    lam = to_float(report.lam)[0]
    return [(k, abs(math.log(to_float(f)[0])) / abs(math.log(lam)) + 1) for k, f in zip(report.kappa, report.f)]
