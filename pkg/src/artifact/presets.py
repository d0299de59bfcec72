"""Built-in measures used as worked examples and golden tests.

Each entry is a JSON-style spec document, so presets and user files share one
loader. Witness families for the H(delta) estimator live next to the preset
they belong to.
"""

from __future__ import annotations

from typing import Callable

from gmpy2 import mpq

from .dims import Witness, fine_level, scale_window

PRESETS: dict[str, dict] = {
    # two halves with unequal weights; the endpoint dims differ and H(delta) blows up as delta -> 0
    "osc": {
        "maps": [{"r": "1/2", "d": "0"}, {"r": "1/2", "d": "1/2"}],
        "probs": ["2/3", "1/3"],
    },
    # uniform weights on four overlapping thirds; not doubling at 1/2
    "notdoubling": {
        "maps": [{"r": "1/3", "d": d} for d in ("0", "1/6", "1/3", "2/3")],
        "probs": ["1/4", "1/4", "1/4", "1/4"],
    },
    # the triadic tiling with a light middle map; comparable but not generalized regular
    "thirds-255": {
        "maps": [{"r": "1/3", "d": d} for d in ("0", "1/3", "2/3")],
        "probs": ["2/5", "1/5", "2/5"],
    },
    # Bernoulli convolution at the golden ratio, over Q(rho) with rho^2 + rho - 1 = 0
    "golden-bernoulli": {
        "field": {"min_poly": [-1, 1, 1], "root_interval": ["3/5", "7/10"]},
        "maps": [{"r": [0, 1], "d": 0}, {"r": [0, 1], "d": [1, -1]}],
        "probs": ["1/2", "1/2"],
    },
    # equicontractive, regular, finite type, but the support has holes
    "notfull": {
        "maps": [{"r": "1/5", "d": d} for d in ("0", "1/10", "2/5", "4/5")],
        "probs": ["1/6", "1/6", "1/2", "1/6"],
    },
    # Cantor measure with weights (1/3, 2/3) except (1/4, 3/4) at levels 1, 2, 4, 8, ...
    "cantor-strictex": {
        "moran": {
            "default": ["1/3", "2/3"],
            "overrides": [{"index_rule": "powers_of_2", "pair": ["1/4", "3/4"]}],
        }
    },
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


# ---------------------------------------------------------------- notfull labels


def _one(cv, graph, vid) -> bool:
    return cv.length == 1


def _two_neighbors(cv, graph, vid) -> bool:
    return len(cv.neighbors) == 2


def _single_at(offset):
    def rule(cv, graph, vid) -> bool:
        return cv.length != 1 and len(cv.neighbors) == 1 and cv.neighbors[0][0] == offset

    return rule


NOTFULL_ALIASES = [
    ("1", _one),
    ("2", _single_at(mpq(0))),
    ("3a", _two_neighbors),
    ("3b", _two_neighbors),
    ("3c", _two_neighbors),
    ("4", _single_at(mpq(1, 2))),
]


ALIASES: dict[str, list] = {"notfull": NOTFULL_ALIASES}


# ---------------------------------------------------------------- witness families


def osc_witnesses(ifs, tree, delta: float, depth: int) -> list[Witness]:
    """x = midpoint of S_{0 1^(N+k)}[0,1], R = 2^-N, r = 2^-(N+k+2)."""
    out = []
    for N in scale_window(delta, depth):
        k_min = max(0, fine_level(delta, N) - N - 2)
        for k in range(k_min, depth - N - 1):
            letters = (0,) + (1,) * (N + k)
            w = ifs.word(letters)
            x = w.left + w.ratio / 2
            out.append(Witness(x, mpq(1, 2**N), mpq(1, 2 ** (N + k + 2)), "osc-0-1^(N+k)"))
    return out


def notfull_witnesses(ifs, tree, delta: float, depth: int, graph=None) -> list[Witness]:
    """Midpoint of the level-n interval on the path (3a^N, 3b^(n-N)); R = 5^-N/2, r = 5^-n/4."""
    a_idx, b_idx = _notfull_steps(tree)
    out = []
    for N in scale_window(delta, depth):
        for n in range(fine_level(delta, N), depth + 1):
            path = (a_idx[0],) + (a_idx[1],) * (N - 1) + (b_idx,) * (n - N)
            d = tree.descend(path)
            x = (d.left + d.right) / 2
            out.append(Witness(x, mpq(1, 2 * 5**N), mpq(1, 4 * 5**n), "notfull-3a^N-3b^(n-N)"))
    return out


def _notfull_steps(tree):
    """Child indices realising the 3a self-loop and the 3a -> 3b step.

    The first 3a-class interval is the leftmost two-neighbor child of the
    root; inside a 3a-class interval the leftmost child repeats the class
    and the second child is the 3b position.
    """
    root_kids = tree.children(tree.root)
    first = next(i for i, k in enumerate(root_kids) if len(k.neighbors) == 2)
    return (first, 0), 1


WITNESS_FAMILIES: dict[str, Callable] = {
    "osc": osc_witnesses,
    "notfull": notfull_witnesses,
}

