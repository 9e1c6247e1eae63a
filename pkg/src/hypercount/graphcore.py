"""Graphs, spanning trees, graph polynomials and cycle matrices.

The graph polynomial is ``Psi = sum over spanning trees T of prod_{e not in T} A_e``.
It equals ``det(M(A))`` where ``M(A) = Tab diag(A) Tab^T`` and ``Tab`` is the
signed loop/edge incidence matrix of a fundamental cycle basis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import Disconnected, NoCycles, SelfLoop, TooManyEdges
from .ffield import FieldElement, FieldSpec, field_tables
from . import kernels
from .kernels import Terms

MAX_TREE_ENUMERATION = 10_000
MAX_LOG_DIVERGENCE_EDGES = 24


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


@dataclass(frozen=True)
class Graph:
    """Connected oriented multigraph on vertices ``0..n_vertices-1``.

    ``chords`` optionally fixes the fundamental cycle basis: the listed
    non-tree edges, in row order, with the remaining edges forming the tree.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...] | None = None
    chords: tuple[int, ...] | None = None
    name: str = "graph"

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def h1(self) -> int:
        return self.n_edges - self.n_vertices + 1


def build_graph(
    vertices: int,
    edges: Sequence[tuple[int, int]],
    labels: Sequence[str] | None = None,
    chords: Sequence[int] | None = None,
    name: str = "graph",
) -> Graph:
    edges = tuple((int(a), int(b)) for a, b in edges)
    if not edges:
        raise ValueError("a graph needs at least one edge")
    uf = _UnionFind(vertices)
    for a, b in edges:
        if not (0 <= a < vertices and 0 <= b < vertices):
            raise ValueError(f"edge ({a}, {b}) references a missing vertex")
        if a == b:
            raise SelfLoop(f"self-loop at vertex {a}")
        uf.union(a, b)
    if len({uf.find(v) for v in range(vertices)}) != 1:
        raise Disconnected("graph is not connected")
    if labels is not None and len(labels) != len(edges):
        raise ValueError("one label per edge required")
    g = Graph(vertices, edges, tuple(labels) if labels else None, None, name)
    if chords is not None:
        chords = tuple(chords)
        tree = [e for e in range(len(edges)) if e not in chords]
        if len(chords) != g.h1 or not _is_spanning_tree(g, tree):
            raise ValueError("chords must be the complement of a spanning tree")
        g = Graph(vertices, edges, g.labels, chords, name)
    return g


def _is_spanning_tree(g: Graph, tree: Sequence[int]) -> bool:
    if len(tree) != g.n_vertices - 1:
        return False
    uf = _UnionFind(g.n_vertices)
    return all(uf.union(*g.edges[e]) for e in tree)


def spanning_trees(g: Graph) -> list[tuple[int, ...]]:
    """All spanning trees as sorted edge-index tuples (exhaustive search)."""
    return [t for t in itertools.combinations(range(g.n_edges), g.n_vertices - 1) if _is_spanning_tree(g, t)]


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def laplacian(g: Graph) -> np.ndarray:
    lap = np.zeros((g.n_vertices, g.n_vertices), dtype=np.int64)
    for a, b in g.edges:
        lap[a, a] += 1
        lap[b, b] += 1
        lap[a, b] -= 1
        lap[b, a] -= 1
    return lap


def spanning_tree_count(g: Graph) -> int:
    """Number of spanning trees, via the Kirchhoff determinant over Z."""
    lap = laplacian(g)
    return _bareiss_det([[int(v) for v in row[1:]] for row in lap[1:]])


def greedy_spanning_tree(g: Graph) -> tuple[int, ...]:
    uf = _UnionFind(g.n_vertices)
    return tuple(e for e, (a, b) in enumerate(g.edges) if uf.union(a, b))


@dataclass(frozen=True)
class CycleMatrix:
    """Signed loop/edge incidence ``tab`` (h1 x |E|) of a fundamental cycle basis."""

    tab: np.ndarray
    tree: tuple[int, ...]
    chords: tuple[int, ...]

    @property
    def n_loops(self) -> int:
        return self.tab.shape[0]

    def terms(self) -> Terms:
        """Linear-form description of ``M(T) = sum_k T_k tab[:, k] tab[:, k]^T``."""
        items = []
        h, n = self.tab.shape
        for k in range(n):
            col = self.tab[:, k]
            for i in range(h):
                for j in range(h):
                    c = int(col[i] * col[j])
                    if c:
                        items.append((i, j, k, c))
        return Terms.from_list(items)

    def symbolic(self) -> np.ndarray:
        """Integer tensor C with M(T)[i, j] = sum_k C[i, j, k] T_k."""
        return np.einsum("ik,jk->ijk", self.tab, self.tab)


def _tree_path(g: Graph, tree: Sequence[int], start: int, goal: int) -> list[tuple[int, int]]:
    """Edges (index, sign) walking the tree from ``start`` to ``goal``."""
    adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in range(g.n_vertices)}
    for e in tree:
        a, b = g.edges[e]
        adj[a].append((b, e, 1))
        adj[b].append((a, e, -1))
    back: dict[int, tuple[int, int, int] | None] = {start: None}
    stack = [start]
    while stack:
        v = stack.pop()
        for w, e, s in adj[v]:
            if w not in back:
                back[w] = (v, e, s)
                stack.append(w)
    path = []
    v = goal
    while back[v] is not None:
        u, e, s = back[v]
        path.append((e, s))
        v = u
    return path[::-1]


def cycle_matrix(g: Graph, tree: Sequence[int] | None = None) -> CycleMatrix:
    """Fundamental cycle matrix; each chord is traversed forwards (entry +1).

    The tree is, in order of preference: ``tree``, the complement of
    ``g.chords``, or the greedy lowest-index spanning tree.
    """
    if g.h1 == 0:
        raise NoCycles("graph is a tree")
    if tree is not None:
        tree = tuple(sorted(tree))
        if not _is_spanning_tree(g, tree):
            raise ValueError("not a spanning tree")
        chords = tuple(e for e in range(g.n_edges) if e not in tree)
    elif g.chords is not None:
        chords = g.chords
        tree = tuple(e for e in range(g.n_edges) if e not in chords)
    else:
        tree = greedy_spanning_tree(g)
        chords = tuple(e for e in range(g.n_edges) if e not in tree)
    tab = np.zeros((len(chords), g.n_edges), dtype=np.int64)
    for i, c in enumerate(chords):
        tail, head = g.edges[c]
        tab[i, c] = 1
        for e, s in _tree_path(g, tree, head, tail):
            tab[i, e] = s
    tab.setflags(write=False)
    return CycleMatrix(tab, tuple(tree), tuple(chords))


def _as_indices(point: Sequence[FieldElement | int], spec: FieldSpec) -> np.ndarray:
    return np.array([p if isinstance(p, (int, np.integer)) else spec.index(p) for p in point], dtype=np.int64)


def psi_tree_sum(g: Graph, points: np.ndarray, spec: FieldSpec, trees: Sequence[tuple[int, ...]] | None = None) -> np.ndarray:
    """Psi at each row of ``points`` (field indices) by summing over spanning trees."""
    t = field_tables(spec)
    points = np.atleast_2d(np.asarray(points, dtype=np.int64))
    if trees is None:
        trees = spanning_trees(g)
    comp = np.array([[e for e in range(g.n_edges) if e not in tree] for tree in trees], dtype=np.int64)
    total = np.zeros(points.shape[0], dtype=np.int64)
    for row in comp:
        mono = np.ones(points.shape[0], dtype=np.int64)
        for e in row:
            mono = t.mul[mono, points[:, e]]
        total = t.add[total, mono]
    return total


def psi_det(g: Graph, points: np.ndarray, spec: FieldSpec, cm: CycleMatrix | None = None) -> np.ndarray:
    """Psi at each row of ``points`` as det M(point)."""
    cm = cm or cycle_matrix(g)
    points = np.atleast_2d(np.asarray(points, dtype=np.int64))
    return kernels.pencil_dets(points, cm.n_loops, cm.terms(), spec)


def psi_eval(g: Graph, point: Sequence[FieldElement | int], spec: FieldSpec, method: str = "auto") -> FieldElement:
    """Evaluate Psi at one point; ``method`` is "trees", "det" or "auto"."""
    x = _as_indices(point, spec)
    if len(x) != g.n_edges:
        raise ValueError(f"expected {g.n_edges} coordinates, got {len(x)}")
    if method == "auto":
        method = "trees" if spanning_tree_count(g) <= MAX_TREE_ENUMERATION else "det"
    if method == "trees":
        value = psi_tree_sum(g, x[None, :], spec)[0]
    elif method == "det":
        value = psi_det(g, x[None, :], spec)[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    return spec.element(int(value))


def is_primitively_log_divergent(g: Graph) -> bool:
    """|E| = 2 h1 and |E'| > 2 h1(E') for every proper edge subset with loops."""
    n = g.n_edges
    if n > MAX_LOG_DIVERGENCE_EDGES:
        raise TooManyEdges(f"{n} edges exceeds the exhaustive-scan cap {MAX_LOG_DIVERGENCE_EDGES}")
    if n != 2 * g.h1:
        return False
    for mask in range(1, (1 << n) - 1):
        sub = [g.edges[e] for e in range(n) if mask >> e & 1]
        verts = {v for edge in sub for v in edge}
        index = {v: i for i, v in enumerate(verts)}
        uf = _UnionFind(len(verts))
        merges = sum(uf.union(index[a], index[b]) for a, b in sub)
        h1 = len(sub) - merges  # |E'| - |V'| + components
        if h1 >= 1 and len(sub) <= 2 * h1:
            return False
    return True


# -- graph families ----------------------------------------------------------

def cycle_graph(n: int) -> Graph:
    """The cycle O_n."""
    if n < 2:
        raise ValueError("a cycle needs at least 2 vertices")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)], name=f"O{n}")


def ws_graph(n: int) -> Graph:
    """Wheel with n spokes: hub 0, rim 1..n; spokes come first, then the rim."""
    if n < 3:
        raise ValueError("WS_n needs n >= 3")
    spokes = [(0, i) for i in range(1, n + 1)]
    rim = [(i, i % n + 1) for i in range(1, n + 1)]
    return build_graph(n + 1, spokes + rim, name=f"ws:{n}")


# XStrip: top corners T0..T3 = 0..3, bottom corners B0..B3 = 4..7, edges e1..e14
_XSTRIP_EDGES = (
    (0, 1), (1, 2), (2, 3),  # e1-e3 along the top
    (0, 6), (4, 2), (5, 3), (1, 7),  # e4-e7 diagonals
    (5, 4), (6, 5), (7, 6),  # e8-e10 along the bottom, right to left
    (4, 0), (1, 5), (2, 6), (3, 7),  # e11-e14 verticals
)
# loop order of the reference table: each row is the cycle of one chord
_XSTRIP_CHORDS = (0, 3, 4, 1, 2, 5, 6)

XSTRIP_TAB = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0, 1, 0],
        [0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 1, 0],
        [0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 1],
        [0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 0, -1, 0, 0],
    ],
    dtype=np.int64,
)
XSTRIP_TAB.setflags(write=False)


def xstrip_graph() -> Graph:
    """Strip of three squares with crossed diagonals in both adjacent pairs."""
    labels = tuple(f"e{i}" for i in range(1, 15))
    return build_graph(8, _XSTRIP_EDGES, labels=labels, chords=_XSTRIP_CHORDS, name="xstrip")


# -- text format ---------------------------------------------------------------

def parse_graph(text: str, name: str = "file") -> Graph:
    """Parse ``V <count>`` followed by ``E <tail> <head>`` lines."""
    n_vertices = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "V" and len(parts) == 2 and n_vertices is None:
            n_vertices = int(parts[1])
        elif parts[0] == "E" and len(parts) == 3 and n_vertices is not None:
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    if n_vertices is None:
        raise ValueError("missing 'V <count>' line")
    return build_graph(n_vertices, edges, name=name)


def read_graph(path: str | Path) -> Graph:
    path = Path(path)
    return parse_graph(path.read_text(encoding="utf-8"), name=f"file:{path.name}")


def format_graph(g: Graph) -> str:
    lines = [f"V {g.n_vertices}"] + [f"E {a} {b}" for a, b in g.edges]
    return "\n".join(lines) + "\n"
