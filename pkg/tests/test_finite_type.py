import pytest
from gmpy2 import mpq

from artifact.finite_type import (
    attach_aliases,
    characteristic_vector,
    children_signature,
    detect_finite_type,
    q_vector,
    vertex_levels,
    walk_vertices,
)
from artifact.net import NetTree
from artifact.presets import NOTFULL_ALIASES

from conftest import graph_for, preset, tree_for


def test_thirds_single_vertex():
    g = graph_for("thirds-255")
    assert g.closed and len(g) == 1
    assert [e.child for e in g.edges[0]] == [0, 0, 0]


def test_golden_closes():
    g = graph_for("golden-bernoulli")
    assert g.closed
    assert len(g) == 6  # frozen from the run
    assert g.closure_level == 4


def test_vectors_are_consistent_with_the_tree():
    # every interval down to level 6 maps to a vertex whose edges reproduce its children
    for name in ("notdoubling", "notfull", "golden-bernoulli"):
        g = graph_for(name)
        t = tree_for(name)
        for n in range(5):
            for d in t.level(n):
                vid = g.vertex_of(d)
                if vid is None:
                    assert d.is_gap
                    continue
                kids = t.children(d)
                assert [g.vertex_of(k) for k in kids] == [e.child for e in g.edges[vid]]
                assert [k.transfer for k in kids if not k.is_gap] == [e.matrix for e in g.edges[vid] if not e.is_gap]


def test_notfull_structure():
    g = graph_for("notfull")
    attach_aliases(g, NOTFULL_ALIASES)
    assert g.closed
    three = next(v for v in range(len(g)) if len(g.vectors[v].neighbors) == 2)
    edges = g.edges[three]
    assert edges[0].child == three and edges[0].matrix == ((mpq(1, 6), 0), (0, mpq(1, 2)))
    assert edges[1].child == three and edges[1].matrix == ((mpq(1, 6), mpq(1, 6)), (0, 0))
    sig = children_signature(g, three)
    assert all(length == mpq(1, 2) for label, length in sig if label != "gap")


def test_q_vector_along_self_loop():
    g = graph_for("notfull")
    t = tree_for("notfull")
    first = next(i for i, k in enumerate(t.children(t.root)) if len(k.neighbors) == 2)
    assert q_vector(g, (first,)) == (mpq(1, 6), mpq(1, 6))
    m = ((mpq(1, 6), 0), (0, mpq(1, 2)))
    vec = (mpq(1, 6), mpq(1, 6))
    for N in range(1, 5):
        vec = (vec[0] * m[0][0], vec[1] * m[1][1])
        assert q_vector(g, (first,) + (0,) * N) == vec
    # the q-vector sums to P_n of the interval it describes
    path = (first, 0, 0, 1, 1)
    assert sum(q_vector(g, path)) == t.descend(path).p_n


def test_q_vector_errors_name_the_step():
    g = graph_for("notfull")
    with pytest.raises(ValueError, match="step 0: .*gap"):
        q_vector(g, (3,))
    with pytest.raises(ValueError, match="step 1"):
        q_vector(g, (0, 42))


def test_vertex_levels_and_walk():
    g = graph_for("notdoubling")
    levels = vertex_levels(g, 3)
    assert levels[0] == {0}
    t = tree_for("notdoubling")
    d = t.level(3)[5]
    assert walk_vertices(g, d.path())[-1] == g.vertex_of(d)
    assert g.vertex_of(d) in levels[3]


def test_open_graph_reports_growth():
    g = detect_finite_type(NetTree(preset("osc")), max_levels=1)
    assert g.closed  # two halves tile; one class
    g2 = detect_finite_type(NetTree(preset("golden-bernoulli")), max_levels=2)
    assert not g2.closed and g2.growth == [1, 4, 5]


def test_characteristic_vector_normalization():
    t = tree_for("notdoubling")
    cv = characteristic_vector(t, t.level(1)[1])
    assert cv.length == mpq(1, 2)
    assert cv.neighbors == ((0, 1), (mpq(1, 2), 1))


def test_graph_json_shape():
    doc = graph_for("notfull").to_json()
    assert doc["closed"] and doc["vertices"][0]["normalized_length"] == "1"
    assert any(e["is_gap"] for e in doc["edges"])
