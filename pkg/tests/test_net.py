import itertools

import pytest
from gmpy2 import mpq

from artifact.ifs import BudgetExceeded
from artifact.net import NetTree, flank_span, p_n

from conftest import preset, tree_for


def spans(intervals):
    return [(d.left, d.right) for d in intervals]


def brute_level(ifs, n):
    """Net intervals and P_n straight from the definition (all words of length n; equicontractive)."""
    imgs = []
    for w in itertools.product(range(ifs.m), repeat=n):
        word = ifs.word(w)
        imgs.append((word.left, word.left + word.ratio, word.prob))
    pts = sorted({x for a, b, _ in imgs for x in (a, b)} | {mpq(0), mpq(1)})
    out = []
    for lo, hi in zip(pts, pts[1:]):
        out.append((lo, hi, sum((p for a, b, p in imgs if a <= lo and b >= hi), mpq(0))))
    return out


def test_notdoubling_level_one():
    lv = tree_for("notdoubling").level(1)
    assert spans(lv) == [
        (0, mpq(1, 6)),
        (mpq(1, 6), mpq(1, 3)),
        (mpq(1, 3), mpq(1, 2)),
        (mpq(1, 2), mpq(2, 3)),
        (mpq(2, 3), 1),
    ]
    assert [d.p_n for d in lv] == [mpq(1, 4), mpq(1, 2), mpq(1, 2), mpq(1, 4), mpq(1, 4)]


def test_level_zero_and_thirds():
    t = tree_for("thirds-255")
    assert spans(t.level(0)) == [(0, 1)] and t.level(0)[0].p_n == 1
    assert [d.p_n for d in t.level(1)] == [mpq(2, 5), mpq(1, 5), mpq(2, 5)]
    assert t.locate(mpq(1, 2), 2).p_n == mpq(1, 25)


@pytest.mark.parametrize("name, depth", [("notdoubling", 4), ("notfull", 3), ("thirds-255", 4), ("osc", 6)])
def test_levels_match_brute_force(name, depth):
    t = NetTree(preset(name))
    for n in range(1, depth + 1):
        got = [(d.left, d.right, d.p_n) for d in t.level(n)]
        assert got == brute_level(preset(name), n)


def test_gaps_are_flagged_and_kept():
    lv = tree_for("notfull").level(1)
    gaps = [(d.left, d.right) for d in lv if d.is_gap]
    assert gaps == [(mpq(3, 10), mpq(2, 5)), (mpq(3, 5), mpq(4, 5))]
    assert p_n(lv[3]) == (0, True)
    kids = tree_for("notfull").children(lv[3])
    assert len(kids) == 1 and kids[0].is_gap


def test_locate_tie_rule():
    t = tree_for("notdoubling")
    assert (t.locate(mpq(1, 2), 1).left, t.locate(mpq(1, 2), 1).right) == (mpq(1, 2), mpq(2, 3))
    assert t.locate(mpq(0), 5).left == 0
    assert t.locate(mpq(1), 5).right == 1
    both = t.locate_both(mpq(1, 2), 1)
    assert spans(both) == [(mpq(1, 3), mpq(1, 2)), (mpq(1, 2), mpq(2, 3))]
    with pytest.raises(ValueError):
        t.locate(mpq(3, 2), 1)


def test_endpoint_chain_is_cheap_and_exact():
    t = NetTree(preset("notdoubling"))
    for n in range(1, 26):
        assert t.locate(mpq(0), n).p_n == mpq(1, 4**n)


def test_flanks():
    t = tree_for("notdoubling")
    first = t.level(1)[0]
    left, right = t.flanks(first)
    assert left is None
    assert flank_span(right) == (mpq(1, 6), mpq(1, 2))
    mid = tree_for("thirds-255").level(1)[1]
    left, right = tree_for("thirds-255").flanks(mid)
    assert flank_span(left) == (0, mpq(1, 3)) and flank_span(right) == (mpq(2, 3), 1)


def test_adjacent_crosses_parents():
    t = tree_for("thirds-255")
    lv = t.level(3)
    for a, b in zip(lv, lv[1:]):
        assert t.adjacent(a, +1) is b
        assert t.adjacent(b, -1) is a


def test_descend_and_path_roundtrip():
    t = tree_for("notdoubling")
    d = t.level(4)[17]
    assert t.descend(d.path()) is d
    with pytest.raises(IndexError):
        t.descend((99,))


def test_transfer_reproduces_masses():
    t = tree_for("notdoubling")
    for d in t.level(3):
        parent = d.parent
        got = tuple(
            sum((parent.masses[i] * d.transfer[i][j] for i in range(len(parent.masses))), mpq(0))
            for j in range(len(d.neighbors))
        )
        assert got == d.masses


def test_interval_budget():
    t = NetTree(preset("notdoubling"), interval_budget=50)
    with pytest.raises(BudgetExceeded):
        t.level(4)
