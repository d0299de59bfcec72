"""Dimension-type quantities computed from net intervals and oracle bounds.

Everything that is a limit in theory is computed here over a finite window
and labelled as such. Ratios that feed a dimension lower bound always pair
the lower bound of the numerator with the upper bound of the denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

from .field import FieldElement, Number, Q, literal, to_float
from .finite_type import TransitionGraph, apply_matrix
from .ifs import WeightedIFS
from .net import NetInterval, NetTree, flank_span
from .oracle import (
    MeasureBounds,
    MoranMeasure,
    certified_ball,
    certified_interval,
    moran_mu_ball,
)
from .separation import GapReport


# ---------------------------------------------------------------- logs


def log_exact(value) -> float:
    """Natural log of a positive exact number, taken on numerator and denominator separately."""
    if isinstance(value, FieldElement):
        return math.log(to_float(value)[0])
    q = Q(value)
    if q <= 0:
        raise ValueError("log of a non-positive number")
    return math.log(int(q.numerator)) - math.log(int(q.denominator))


def safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def log_lambda(ifs: WeightedIFS) -> float:
    return log_exact(ifs.lam)


# ---------------------------------------------------------------- Gamma sums


def _edge_sum(ifs: WeightedIFS, letters: Sequence[int], start_ratio: Number, threshold: Number) -> dict:
    """p-mass by word over the sub-alphabet ``letters`` for extensions of a word with ratio ``start_ratio``.

    Returns {letters tuple: p_w} for words w with start*r_w <= threshold < start*r_{w-}.
    """
    out: dict = {}
    stack = [((), mpq(1), mpq(1))]
    while stack:
        w, r, p = stack.pop()
        if start_ratio * r <= threshold:
            out[w] = p
            continue
        for j in letters:
            stack.append((w + (j,), r * ifs.ratios[j], p * ifs.probs[j]))
    return out


def gamma(ifs: WeightedIFS, n: int, side: str) -> Number:
    """Mass of the level-n words fixing 0 (side 'L') or 1 (side 'R')."""
    letters = ifs.fixes_zero() if side == "L" else ifs.fixes_one()
    words = _edge_sum(ifs, letters, mpq(1), ifs.lam_pow(n))
    return sum(words.values(), mpq(0))


def gamma_delta(ifs: WeightedIFS, delta: NetInterval, n: int) -> tuple:
    """(left, right) edge-path sums of level n below ``delta``.

    A left-edge path is a word w over maps fixing 0 that extends some
    covering word u with S_u(0) = left(delta) into the cross-section n levels
    further down; each distinct w is counted once.
    """
    thr = ifs.lam_pow(delta.level + n)
    left_words: dict = {}
    right_words: dict = {}
    for a, r, _m in delta.neighbors:
        if a == delta.left:
            left_words.update(_edge_sum(ifs, ifs.fixes_zero(), r, thr))
        if a + r == delta.right:
            right_words.update(_edge_sum(ifs, ifs.fixes_one(), r, thr))
    return sum(left_words.values(), mpq(0)), sum(right_words.values(), mpq(0))


# ---------------------------------------------------------------- endpoint and local dimensions


@dataclass
class EndpointDims:
    p0: list  # P_n(Delta_n(0)) for n = 1..N
    p1: list
    dim0: float
    dim1: float
    geometric0: bool
    geometric1: bool

    def as_dict(self) -> dict:
        return {
            "dim_at_0": self.dim0,
            "dim_at_1": self.dim1,
            "exact_geometric_at_0": self.geometric0,
            "exact_geometric_at_1": self.geometric1,
            "P_n_at_0": [str(v) for v in self.p0],
            "P_n_at_1": [str(v) for v in self.p1],
        }


def _geometric(seq: Sequence) -> bool:
    if len(seq) < 2:
        return False
    ratio = seq[1] / seq[0]
    return all(b == a * ratio for a, b in zip(seq, seq[1:]))


def _endpoint_dim(seq: Sequence, ll: float) -> tuple[float, bool]:
    if _geometric(seq):
        return log_exact(seq[1] / seq[0]) / ll, True
    # finite-depth stand-in for the liminf of P_n^(1/n)
    return min(log_exact(v) / n for n, v in enumerate(seq, start=1)) / ll, False


def endpoint_dims(ifs: WeightedIFS, tree: NetTree, depth: int) -> EndpointDims:
    p0 = [tree.locate(mpq(0), n).p_n for n in range(1, depth + 1)]
    p1 = [tree.locate(mpq(1), n).p_n for n in range(1, depth + 1)]
    ll = log_lambda(ifs)
    d0, g0 = _endpoint_dim(p0, ll)
    d1, g1 = _endpoint_dim(p1, ll)
    return EndpointDims(p0, p1, d0, d1, g0, g1)


@dataclass
class LocalDim:
    upper: float
    lower: float
    geometric: bool
    sequence: list
    alternate: "LocalDim | None" = None  # the other tie choice at shared endpoints


def _local_from_seq(seq: list, ll: float, window_start: int) -> LocalDim:
    vals = [log_exact(seq[n - 1]) / (n * ll) for n in range(window_start, len(seq) + 1)]
    geo = len(seq) >= 2 and seq[0] != 0 and _geometric(seq)
    if geo:
        v = log_exact(seq[1] / seq[0]) / ll
        return LocalDim(v, v, True, seq)
    return LocalDim(max(vals), min(vals), False, seq)


def local_dim(ifs: WeightedIFS, tree: NetTree, x, depth: int) -> LocalDim | None:
    """Upper/lower estimates of log P_n(Delta_n(x)) / (n log lam) over the last half of levels.

    When x is a net-interval endpoint the interval to the left of x gives a
    second sequence, reported as ``alternate``. Returns None when x is
    outside the support at some computed level.
    """
    x = x if isinstance(x, FieldElement) else Q(x)
    ll = log_lambda(ifs)
    start = max(1, (depth + 1) // 2)
    right_seq, left_seq, tie = [], [], False
    for n in range(1, depth + 1):
        both = tree.locate_both(x, n)
        right_seq.append(both[-1].p_n)
        left_seq.append(both[0].p_n)
        tie = tie or len(both) > 1
    right_ok = all(v > 0 for v in right_seq)
    left_ok = tie and all(v > 0 for v in left_seq)
    if not right_ok:
        # x sits on the edge of a gap: only the side inside the support is meaningful
        return _local_from_seq(left_seq, ll, start) if left_ok else None
    main = _local_from_seq(right_seq, ll, start)
    if left_ok:
        main.alternate = _local_from_seq(left_seq, ll, start)
    return main


# ---------------------------------------------------------------- Q_n


@dataclass
class QResult:
    values: list  # Q_1 .. Q_nmax as exact rationals (lower bounds of the sup)
    exact: bool  # True when the state space was exhausted
    states: int
    method: str

    def as_dict(self) -> dict:
        return {
            "Q": [str(v) for v in self.values],
            "exact_over_all_N": self.exact,
            "states": self.states,
            "method": self.method,
        }


def _normalize(vec: tuple) -> tuple:
    for v in vec:
        if v != 0:
            return tuple(x / v for x in vec)
    return vec


def _pareto_min(vectors: list) -> list:
    """Vectors not dominated componentwise by another; enough to realise min q.u for every q >= 0."""
    vectors = sorted(set(vectors), key=lambda v: sum(v, mpq(0)))
    kept: list = []
    for v in vectors:
        if any(all(a <= b for a, b in zip(k, v)) for k in kept):
            continue
        kept.append(v)
    return kept


def _column_sets(graph: TransitionGraph, n_max: int) -> list[dict]:
    """U[j][v]: Pareto-minimal vectors T_path * 1 over non-gap paths of length j from vertex v.

    For a state (v, q), the smallest descendant mass j levels down is
    min over u in U[j][v] of q . u, independent of which q is asked about.
    """
    dims_of = {v: len(cv.neighbors) for v, cv in enumerate(graph.vectors)}
    U = [{v: [tuple(mpq(1) for _ in range(dims_of[v]))] for v in range(len(graph))}]
    for _ in range(n_max):
        prev = U[-1]
        cur = {}
        for v in range(len(graph)):
            cands = []
            for e in graph.edges.get(v, ()):
                if e.child is None:
                    continue
                for u in prev[e.child]:
                    cands.append(tuple(sum((row[k] * u[k] for k in range(len(u))), mpq(0)) for row in e.matrix))
            cur[v] = _pareto_min(cands)
        U.append(cur)
    return U


def q_sequence(
    tree: NetTree,
    n_max: int,
    graph: TransitionGraph | None = None,
    state_budget: int = 5000,
    depth: int = 12,
) -> QResult:
    """Q_n for n = 1..n_max as the largest P(ancestor)/P(descendant n levels down).

    With a closed transition graph the search runs over states (vertex,
    q-vector up to scaling); when these are exhausted the values are exact
    over all N. Otherwise the concrete tree is scanned to ``depth``.
    """
    if graph is not None and graph.closed:
        return _q_from_graph(graph, n_max, state_budget)
    return _q_from_tree(tree, n_max, depth)


def _q_from_graph(graph: TransitionGraph, n_max: int, state_budget: int) -> QResult:
    U = _column_sets(graph, n_max)
    best = [mpq(0)] * n_max
    root = (graph.root, (mpq(1),))
    seen = {root}
    queue = [root]
    head = 0
    exhausted = True
    while head < len(queue):
        vid, vec = queue[head]
        head += 1
        total = sum(vec, mpq(0))
        for j in range(n_max):
            us = U[j + 1][vid]
            if not us:
                continue
            m = min(sum((a * b for a, b in zip(vec, u)), mpq(0)) for u in us)
            if m > 0 and total / m > best[j]:
                best[j] = total / m
        for e in graph.edges[vid]:
            if e.child is None:
                continue
            st = (e.child, _normalize(apply_matrix(vec, e.matrix)))
            if st not in seen:
                if len(seen) >= state_budget:
                    exhausted = False
                    continue
                seen.add(st)
                queue.append(st)
    return QResult(best, exhausted, len(seen), "graph-states")


def _q_from_tree(tree: NetTree, n_max: int, depth: int) -> QResult:
    levels = [tree.level(n) for n in range(depth + 1)]
    best = [mpq(0)] * n_max
    # minima[node] = list of min P at 1.. levels below (None when only gaps)
    minima: dict = {}
    for n in range(depth, -1, -1):
        for d in levels[n]:
            if d.is_gap:
                continue
            kids = [k for k in d._children or () if not k.is_gap] if n < depth else []
            mins = []
            for j in range(min(n_max, depth - n)):
                cand = []
                for k in kids:
                    if j == 0:
                        cand.append(k.p_n)
                    else:
                        km = minima.get(id(k))
                        if km is not None and len(km) > j - 1 and km[j - 1] is not None:
                            cand.append(km[j - 1])
                mins.append(min(cand) if cand else None)
            minima[id(d)] = mins
            for j, m in enumerate(mins):
                if m:
                    ratio = d.p_n / m
                    if ratio > best[j]:
                        best[j] = ratio
    return QResult(best, False, sum(len(lv) for lv in levels), f"tree-scan to level {depth}")


def qa_upper_estimate(q: QResult, ifs: WeightedIFS) -> float:
    """max_n log Q_n / (n |log lam|) over the computed window."""
    ll = abs(log_lambda(ifs))
    vals = [log_exact(v) / (n * ll) for n, v in enumerate(q.values, start=1) if v > 0]
    return max(vals) if vals else float("nan")


# ---------------------------------------------------------------- trend helpers


def trend(seq: Sequence[float]) -> str:
    """'increasing', 'decreasing' or 'mixed' over the last half of a sequence."""
    tail = list(seq[len(seq) // 2 :])
    if len(tail) < 2:
        return "mixed"
    if all(b > a for a, b in zip(tail, tail[1:])):
        return "increasing"
    if all(b < a for a, b in zip(tail, tail[1:])):
        return "decreasing"
    return "mixed"


def exponential_rate(values: Sequence[float], ns: Sequence[int]) -> float:
    """Slope c of a least-squares fit log v ~ a + b log n + c n."""
    import numpy as np

    ns_a = np.asarray(ns, dtype=float)
    y = np.log(np.asarray(values, dtype=float))
    if len(ns_a) < 3:
        return float((y[-1] - y[0]) / (ns_a[-1] - ns_a[0])) if len(ns_a) == 2 else 0.0
    A = np.column_stack([np.ones_like(ns_a), np.log(ns_a), ns_a])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[2])


# ---------------------------------------------------------------- regularity ledger


@dataclass
class RegularityLedger:
    regular: bool
    generalized_regular: dict  # q -> {"sequence": [...], "trend": str}
    generalized_regular_verdict: str
    weakly_comparable: dict
    weakly_comparable_verdict: str
    depth: int
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "regular": self.regular,
            "generalized_regular_verdict": self.generalized_regular_verdict,
            "generalized_regular_trend": self.generalized_regular,
            "weakly_comparable_verdict": self.weakly_comparable_verdict,
            "weakly_comparable_trend": self.weakly_comparable,
            "depth": self.depth,
            "warnings": self.warnings,
        }


def adjacent_ratio_maxima(tree: NetTree, depth: int) -> list:
    """max over adjacent non-gap level-n pairs of the larger P ratio, n = 1..depth."""
    out = []
    for n in range(1, depth + 1):
        lv = [d for d in tree.level(n) if not d.is_gap]
        best = mpq(1)
        for a, b in zip(lv, lv[1:]):
            r = a.p_n / b.p_n if a.p_n > b.p_n else b.p_n / a.p_n
            if r > best:
                best = r
        out.append(best)
    return out


def regularity_checks(
    ifs: WeightedIFS,
    tree: NetTree,
    q_grid: Sequence,
    qres: QResult,
    comparable_depth: int = 7,
) -> RegularityLedger:
    depth = len(qres.values)
    warnings = []
    if not ifs.full_support:
        warnings.append("assumption violated: support is not [0,1]")
    gam = [gamma(ifs, n, "L") + gamma(ifs, n, "R") for n in range(1, depth + 1)]
    gen = {}
    any_increasing = False
    all_decreasing = True
    for q in q_grid:
        qf = float(q)
        seq = [
            safe_exp(log_exact(Qn) + log_exact(g) - n * math.log(qf)) if Qn > 0 else 0.0
            for n, (Qn, g) in enumerate(zip(qres.values, gam), start=1)
        ]
        t = trend(seq)
        gen[str(q)] = {"sequence": seq, "trend": t}
        any_increasing |= t == "increasing"
        all_decreasing &= t == "decreasing"
    if ifs.is_regular:
        gverdict = "generalized regular (regular systems always are)"
    elif any_increasing:
        gverdict = "NOT generalized regular (trend increasing for some q)"
    elif all_decreasing:
        gverdict = "consistent with generalized regular (finite-depth trend)"
    else:
        gverdict = "undetermined at this depth"
    adj = adjacent_ratio_maxima(tree, comparable_depth)
    wc = {}
    unbounded = False
    for q in q_grid:
        qf = float(q)
        seq = [safe_exp(log_exact(a) - n * math.log(qf)) for n, a in enumerate(adj, start=1)]
        t = trend(seq)
        wc[str(q)] = {"sequence": seq, "trend": t}
        unbounded |= t == "increasing"
    wverdict = "unbounded trend for some q" if unbounded else "bounded over the window"
    return RegularityLedger(ifs.is_regular, gen, gverdict, wc, wverdict, depth, warnings)


# ---------------------------------------------------------------- quasi-net doubling


@dataclass
class RatioRecord:
    level: int
    interval: tuple
    flank: tuple
    side: str
    lower: object  # certified lower bound of min(mu(D)/mu(D*), mu(D*)/mu(D))

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "interval": [literal(v) for v in self.interval],
            "flank": [literal(v) for v in self.flank],
            "side": self.side,
            "ratio_lower": str(self.lower),
            "ratio_lower_float": float(self.lower),
        }


@dataclass
class DoublingLedger:
    levels: list  # n values
    worst: list  # per level: worst RatioRecord over the special-point chains
    worst_exhaustive: dict  # n -> worst RatioRecord over every qualifying interval (small n only)
    rows: dict  # q -> {"constants": [...], "rate": float, "verdict": "pass"/"fail", "witness": ...}
    exhaustive_depth: int
    warnings: list = field(default_factory=list)

    def row(self, q) -> dict:
        return self.rows[str(q)]

    def as_dict(self) -> dict:
        return {
            "levels": self.levels,
            "exhaustive_depth": self.exhaustive_depth,
            "worst_on_chains": [w.as_dict() if w else None for w in self.worst],
            "worst_exhaustive": {str(n): w.as_dict() if w else None for n, w in self.worst_exhaustive.items()},
            "rows": self.rows,
            "warnings": self.warnings,
        }


def special_points(ifs: WeightedIFS) -> list:
    pts = {mpq(0), mpq(1)}
    for r, d in zip(ifs.ratios, ifs.translations):
        pts.add(d)
        pts.add(d + r)
    return sorted(pts)


def _pair_ratio(ifs, delta, flank, depth_extra, max_depth):
    lo_f, hi_f = flank_span(flank)
    start = delta.level + depth_extra
    a = certified_interval(ifs, delta.left, delta.right, start, max_depth)
    b = certified_interval(ifs, lo_f, hi_f, start, max_depth)
    if a.upper == 0 or b.upper == 0:
        return mpq(0)
    return min(a.lower / b.upper, b.lower / a.upper)


def _worst(ifs, tree, cands, n, min_len, depth_extra, max_depth, cache) -> RatioRecord | None:
    best = None
    for d in cands:
        if d.is_gap or d.length < min_len:
            continue
        lf, rf = tree.flanks(d)
        for side, fl in (("L", lf), ("R", rf)):
            if fl is None:
                continue
            key = (d.left, d.right, side)
            val = cache.get(key)
            if val is None:
                val = cache[key] = _pair_ratio(ifs, d, fl, depth_extra, max_depth)
            if best is None or val < best.lower:
                best = RatioRecord(n, (d.left, d.right), flank_span(fl), side, val)
    return best


# a step counts as a decrease only beyond the oracle's relative tolerance on both bounds
DECREASE_TOL = 2e-3


def quasi_net_doubling_check(
    ifs: WeightedIFS,
    tree: NetTree,
    report: GapReport,
    q_values: Sequence,
    depth: int,
    exhaustive_depth: int = 5,
    depth_extra: int = 10,
    max_oracle_depth: int = 128,
) -> DoublingLedger:
    """Certified two-sided ratios mu(D)/mu(D*) against the flanking unions.

    Verdicts use one family at every level: the intervals at the IFS's
    level-1 endpoints (0, 1 and every S_j(0), S_j(1)). Up to
    ``exhaustive_depth`` every qualifying interval is also examined and its
    minimum reported. Gap intervals carry no mass and are skipped as centres.

    For each q the row records c(n) = q^n * (worst ratio at level n). A q > 1
    row fails when the fitted exponential rate of the worst ratio over the
    last half of levels is at or below -log q; the q = 1 row fails when the
    worst ratio keeps decreasing there.
    """
    warnings = []
    if not ifs.full_support:
        warnings.append("assumption violated: support is not [0,1]")
    pts = special_points(ifs)
    cache: dict = {}
    worst: list = []
    worst_all: dict = {}
    levels = list(range(1, depth + 1))
    for n in levels:
        f_next = report.f[n] if n < len(report.f) else report.f[-1]
        min_len = f_next * ifs.lam_pow(n + 1)
        seen = {}
        for x in pts:
            for d in tree.locate_both(x, n):
                seen[(d.left, d.right)] = d
        chain = [seen[k] for k in sorted(seen)]
        worst.append(_worst(ifs, tree, chain, n, min_len, depth_extra, max_oracle_depth, cache))
        if n <= exhaustive_depth:
            worst_all[n] = _worst(ifs, tree, tree.level(n), n, min_len, depth_extra, max_oracle_depth, cache)
    rows = {}
    tail = [i for i in range(len(levels)) if levels[i] >= (depth + 1) // 2]
    for q in q_values:
        qf = float(q)
        consts = [
            (safe_exp(log_exact(w.lower) + n * math.log(qf)) if w and w.lower > 0 else 0.0)
            for n, w in zip(levels, worst)
        ]
        vals = [float(worst[i].lower) for i in tail if worst[i] and worst[i].lower > 0]
        ns = [levels[i] for i in tail if worst[i] and worst[i].lower > 0]
        if len(vals) < len(tail):
            verdict, rate = "fail", float("-inf")
        else:
            rate = exponential_rate(vals, ns)
            if qf == 1.0:
                down = all(b < a * (1 - DECREASE_TOL) for a, b in zip(vals, vals[1:]))
                verdict = "fail" if down else "pass"
            else:
                verdict = "pass" if rate > -math.log(qf) else "fail"
        witness = worst[-1].as_dict() if worst and worst[-1] else None
        rows[str(q)] = {"constants": consts, "rate": rate, "verdict": verdict, "witness": witness}
    return DoublingLedger(levels, worst, worst_all, rows, exhaustive_depth, warnings)


# ---------------------------------------------------------------- H(delta)


@dataclass(frozen=True)
class Witness:
    x: object
    R: object
    r: object
    family: str


@dataclass
class HDeltaResult:
    value: float
    witness: dict | None
    delta: float
    depth: int
    evaluated: int
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "depth": self.depth,
            "certified_lower_bound": self.value,
            "witness": self.witness,
            "evaluated": self.evaluated,
            "warnings": self.warnings,
        }


def scale_window(delta: float, depth: int) -> range:
    """Admissible coarse levels N: the last half of those with ceil((1+delta)N) <= depth."""
    n_hi = max(1, int(math.floor(depth / (1 + delta))))
    while math.ceil((1 + delta) * n_hi) > depth and n_hi > 1:
        n_hi -= 1
    n_lo = max(1, (n_hi + 1) // 2)
    return range(n_lo, n_hi + 1)


def fine_level(delta: float, N: int) -> int:
    return math.ceil((1 + delta) * N - 1e-12)


def h_delta_estimate(
    mass: Callable[[object, object], tuple],
    witnesses: Iterable[Witness],
    delta: float,
    depth: int,
) -> HDeltaResult:
    """max over witnesses of log(lower mu B(x,R) / upper mu B(x,r)) / log(R/r).

    ``mass(x, radius)`` returns certified (lower, upper). Witnesses whose
    fine ball carries no certified mass are skipped.
    """
    best = 0.0
    best_w = None
    count = 0
    for w in witnesses:
        lo_R, _ = mass(w.x, w.R)
        _, up_r = mass(w.x, w.r)
        count += 1
        if lo_R <= 0 or up_r <= 0:
            continue
        val = (log_exact(lo_R) - log_exact(up_r)) / (log_exact(w.R) - log_exact(w.r))
        if best_w is None or val > best:
            best = val
            best_w = {
                "family": w.family,
                "x": literal(w.x),
                "R": literal(w.R),
                "r": literal(w.r),
                "mu_R_lower": str(lo_R),
                "mu_r_upper": str(up_r),
                "value": val,
            }
    warnings = [] if count else ["empty witness set"]
    return HDeltaResult(max(best, 0.0) if best_w else 0.0, best_w, delta, depth, count, warnings)


def ifs_mass(ifs: WeightedIFS, max_oracle_depth: int = 512) -> Callable:
    cache: dict = {}

    def mass(x, radius):
        key = (x, radius)
        hit = cache.get(key)
        if hit is None:
            k = max(1, int(math.ceil(log_exact(radius) / log_lambda(ifs)))) + 4
            b: MeasureBounds = certified_ball(ifs, x, radius, k, max_oracle_depth)
            hit = (b.lower, b.upper)
            cache[key] = hit
        return hit

    return mass


def moran_mass(measure: MoranMeasure) -> Callable:
    def mass(x, radius):
        v = moran_mu_ball(measure, x, radius)
        return v.lower, v.upper

    return mass


def default_witnesses(ifs: WeightedIFS, tree: NetTree, delta: float, depth: int) -> list[Witness]:
    """Endpoints and midpoints of the net intervals at the level-1 endpoints, R = lam^N, r = lam^n."""
    out = []
    pts = special_points(ifs)
    for N in scale_window(delta, depth):
        n = fine_level(delta, N)
        R, r = ifs.lam_pow(N), ifs.lam_pow(n)
        xs = {}
        for x in pts:
            for d in tree.locate_both(x, n):
                if d.is_gap:
                    continue
                for y in (d.left, d.right, (d.left + d.right) / 2):
                    xs[y] = True
        for y in sorted(xs):
            out.append(Witness(y, R, r, "net-points"))
    return out


def moran_witnesses(delta: float, depth: int) -> list[Witness]:
    out = []
    pts = [mpq(0), mpq(1, 3), mpq(2, 3), mpq(1)]
    for N in scale_window(delta, depth):
        for n in range(fine_level(delta, N), depth + 1):
            for x in pts:
                out.append(Witness(x, mpq(1, 3**N), mpq(1, 3**n), "cantor-points"))
    return out


def moran_scale_exponent(measure: MoranMeasure, n: int, x=mpq(0)) -> float:
    """log(mu B(x, 3^-(n-1)) / mu B(x, 3^-n)) / log 3 from exact masses."""
    big = moran_mu_ball(measure, x, mpq(1, 3 ** (n - 1)))
    small = moran_mu_ball(measure, x, mpq(1, 3**n))
    return (log_exact(big.lower) - log_exact(small.upper)) / math.log(3)
