"""Quotient of the net-interval tree by characteristic vectors.

A characteristic vector is the interval's length and its covering maps'
offsets and ratios, all rescaled by lam**-n. Intervals sharing a vector have
congruent subtrees, so one representative per vector is enough to learn the
children and transfer matrices of the whole class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from gmpy2 import mpq

from .field import literal, to_float
from .net import NetInterval, NetTree


@dataclass(frozen=True)
class CharacteristicVector:
    length: object
    neighbors: tuple  # ((offset, ratio), ...) sorted

    def describe(self) -> dict:
        return {
            "normalized_length": literal(self.length),
            "neighbors": [[literal(o), literal(r)] for o, r in self.neighbors],
        }


def characteristic_vector(tree: NetTree, delta: NetInterval) -> CharacteristicVector:
    scale = 1 / tree.ifs.lam_pow(delta.level)
    left = delta.left
    nbrs = tuple(((left - a) * scale, r * scale) for a, r, _ in delta.neighbors)
    return CharacteristicVector((delta.right - left) * scale, nbrs)


@dataclass
class Edge:
    order: int
    child: int | None  # None for a gap
    matrix: tuple
    length: object  # normalized (child length / lam**(n+1))

    @property
    def is_gap(self) -> bool:
        return self.child is None


@dataclass
class TransitionGraph:
    tree: NetTree
    vectors: list = field(default_factory=list)
    reps: list = field(default_factory=list)
    edges: dict = field(default_factory=dict)
    closed: bool = False
    closure_level: int | None = None
    growth: list = field(default_factory=list)  # vertex count after each level
    aliases: dict = field(default_factory=dict)  # vertex id -> display label

    @property
    def root(self) -> int:
        return 0

    def __len__(self) -> int:
        return len(self.vectors)

    def label(self, vid: int | None) -> str:
        if vid is None:
            return "gap"
        return self.aliases.get(vid, str(vid))

    def vertex_of(self, delta: NetInterval) -> int | None:
        if delta.is_gap:
            return None
        return self._index.get(characteristic_vector(self.tree, delta))

    def to_json(self) -> dict:
        return {
            "vertices": [
                {"id": i, "label": self.label(i), **self.vectors[i].describe()} for i in range(len(self.vectors))
            ],
            "edges": [
                {
                    "parent": vid,
                    "child_order_index": e.order,
                    "child": e.child,
                    "matrix": [[str(x) for x in row] for row in e.matrix],
                    "is_gap": e.is_gap,
                }
                for vid in sorted(self.edges)
                for e in self.edges[vid]
            ],
            "closure_level": self.closure_level,
            "closed": self.closed,
            "growth": list(self.growth),
        }


def _expand(graph: TransitionGraph, vid: int, verify: bool) -> list[int]:
    tree = graph.tree
    rep = graph.reps[vid]
    new: list[int] = []
    out: list[Edge] = []
    scale = 1 / tree.ifs.lam_pow(rep.level + 1)
    for child in tree.children(rep):
        if child.is_gap:
            out.append(Edge(child.index, None, (), child.length * scale))
            continue
        cv = characteristic_vector(tree, child)
        cid = graph._index.get(cv)
        if cid is None:
            cid = len(graph.vectors)
            graph._index[cv] = cid
            graph.vectors.append(cv)
            graph.reps.append(child)
            new.append(cid)
        out.append(Edge(child.index, cid, child.transfer, cv.length))
    graph.edges[vid] = out
    return new


def detect_finite_type(
    tree: NetTree,
    max_levels: int = 12,
    max_vertices: int = 10_000,
    verify: bool = True,
) -> TransitionGraph:
    """Breadth-first discovery of characteristic vectors from the root.

    The graph is closed when a whole level is expanded without producing a new
    vector and every known vector has its edges. Otherwise ``closed`` is False
    and ``growth`` records the vertex count level by level.
    """
    graph = TransitionGraph(tree)
    graph._index = {}
    root_cv = characteristic_vector(tree, tree.root)
    graph._index[root_cv] = 0
    graph.vectors.append(root_cv)
    graph.reps.append(tree.root)
    frontier = [0]
    graph.growth.append(1)
    for level in range(1, max_levels + 1):
        discovered: list[int] = []
        for vid in frontier:
            discovered.extend(_expand(graph, vid, verify))
            if len(graph.vectors) > max_vertices:
                graph.growth.append(len(graph.vectors))
                return graph
        graph.growth.append(len(graph.vectors))
        if not discovered:
            graph.closed = True
            graph.closure_level = level
            break
        frontier = discovered
    if verify and graph.closed:
        _verify_congruence(graph)
    return graph


def _verify_congruence(graph: TransitionGraph, samples: int = 2) -> None:
    """Check a few further members of each class against the representative's edges."""
    tree = graph.tree
    seen: dict[int, int] = {}
    stack = [tree.root]
    checked = 0
    while stack and checked < samples * len(graph.vectors):
        node = stack.pop()
        vid = graph.vertex_of(node)
        if vid is None:
            continue
        if node is not graph.reps[vid] and seen.get(vid, 0) < samples:
            seen[vid] = seen.get(vid, 0) + 1
            checked += 1
            got = [(graph.vertex_of(c), c.transfer if not c.is_gap else ()) for c in tree.children(node)]
            want = [(e.child, e.matrix) for e in graph.edges[vid]]
            if got != want:
                raise AssertionError(f"class {vid} is not congruent at {node}")
        if node.level < (graph.closure_level or 0) + 1:
            stack.extend(reversed(tree.children(node)))


def vertex_levels(graph: TransitionGraph, depth: int) -> list[set]:
    """The set of vertices occurring at each level 0..depth (walks the closed graph)."""
    if not graph.closed:
        raise ValueError("graph is not closed")
    levels = [{graph.root}]
    for _ in range(depth):
        nxt = set()
        for vid in levels[-1]:
            for e in graph.edges[vid]:
                if e.child is not None:
                    nxt.add(e.child)
        levels.append(nxt)
    return levels


def q_vector(graph: TransitionGraph, path: Sequence[int]) -> tuple:
    """Root vector (1) pushed through the transfer matrices along child indices ``path``."""
    vec: tuple = (mpq(1),)
    vid: int | None = graph.root
    for step, idx in enumerate(path):
        if vid is None:
            raise ValueError(f"step {step}: walk continues below a gap")
        edges = graph.edges.get(vid)
        if edges is None:
            raise ValueError(f"step {step}: vertex {vid} has not been expanded")
        if not 0 <= idx < len(edges):
            raise ValueError(f"step {step}: vertex {graph.label(vid)} has no child {idx}")
        e = edges[idx]
        if e.is_gap:
            raise ValueError(f"step {step}: child {idx} of vertex {graph.label(vid)} is a gap")
        vec = apply_matrix(vec, e.matrix)
        vid = e.child
    return vec


def apply_matrix(vec: Sequence, matrix: Sequence[Sequence]) -> tuple:
    cols = len(matrix[0]) if matrix else 0
    return tuple(sum((vec[i] * matrix[i][j] for i in range(len(vec))), mpq(0)) for j in range(cols))


def children_signature(graph: TransitionGraph, vid: int) -> list[tuple[str, object]]:
    """Ordered (label, normalized length) pairs for the children of a vertex; gaps labelled ``gap``."""
    return [(graph.label(e.child), e.length) for e in graph.edges[vid]]


def walk_vertices(graph: TransitionGraph, path: Sequence[int]) -> list[int]:
    vid = graph.root
    out = [vid]
    for idx in path:
        vid = graph.edges[vid][idx].child
        out.append(vid)
    return out


def attach_aliases(graph: TransitionGraph, rules: Sequence[tuple[str, Callable]]) -> dict:
    """Name vertices by structural predicates ``rule(vector, graph, vid) -> bool``.

    Several names matching one vertex are joined with '/', which exposes
    classes that a naming scheme splits but the vectors do not.
    """
    names: dict[int, list[str]] = {}
    for name, rule in rules:
        for vid, cv in enumerate(graph.vectors):
            if rule(cv, graph, vid):
                names.setdefault(vid, []).append(name)
    graph.aliases = {vid: "/".join(ns) for vid, ns in names.items()}
    return graph.aliases


def vertex_float_summary(graph: TransitionGraph) -> list[dict]:
    return [
        {"id": i, "label": graph.label(i), "length": to_float(cv.length)[0], "neighbors": len(cv.neighbors)}
        for i, cv in enumerate(graph.vectors)
    ]
