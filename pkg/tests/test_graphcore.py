import numpy as np
import pytest

from hypercount.errors import Disconnected, NoCycles, SelfLoop, TooManyEdges
from hypercount.ffield import make_field
from hypercount.graphcore import (
    XSTRIP_TAB,
    build_graph,
    cycle_graph,
    cycle_matrix,
    format_graph,
    is_primitively_log_divergent,
    laplacian,
    parse_graph,
    psi_det,
    psi_eval,
    psi_tree_sum,
    spanning_tree_count,
    spanning_trees,
    ws_graph,
    xstrip_graph,
)


def test_build_graph_examples():
    assert build_graph(3, [(0, 1), (1, 2), (2, 0)]).h1 == 1
    g = ws_graph(3)
    assert (g.n_vertices, g.n_edges, g.h1) == (4, 6, 3)
    with pytest.raises(Disconnected):
        build_graph(4, [(0, 1), (2, 3)])
    with pytest.raises(SelfLoop):
        build_graph(2, [(0, 1), (1, 1)])


@pytest.mark.parametrize("n,expected", [(3, 16), (4, 45), (5, 121)])
def test_ws_spanning_trees(n, expected):
    g = ws_graph(n)
    assert (g.n_vertices, g.n_edges, g.h1) == (n + 1, 2 * n, n)
    assert spanning_tree_count(g) == expected
    assert len(spanning_trees(g)) == expected


@pytest.mark.parametrize("n", [3, 4, 7])
def test_cycle_trees(n):
    assert spanning_tree_count(cycle_graph(n)) == n


def test_laplacian_rows_sum_to_zero():
    L = laplacian(xstrip_graph())
    assert not L.sum(axis=1).any()


def test_kirchhoff_matches_enumeration_xstrip():
    g = xstrip_graph()
    assert spanning_tree_count(g) == len(spanning_trees(g))


def test_psi_examples():
    f2, f5 = make_field(2), make_field(5)
    assert psi_eval(cycle_graph(3), [1, 1, 1], f2) == f2.one
    assert psi_eval(ws_graph(3), [1] * 6, f5) == f5.one
    for g in (cycle_graph(3), ws_graph(4), xstrip_graph()):
        assert psi_eval(g, [0] * g.n_edges, f5) == f5.zero


def test_psi_paths_agree_on_single_points():
    f = make_field(7)
    rng = np.random.default_rng(3)
    g = ws_graph(4)
    for _ in range(20):
        pt = [int(v) for v in rng.integers(0, 7, g.n_edges)]
        assert psi_eval(g, pt, f, "trees") == psi_eval(g, pt, f, "det")


def _poly_monomial_count(g):
    # expand the tree sum: every spanning tree contributes a distinct monomial with coefficient 1
    return len({frozenset(set(range(g.n_edges)) - set(t)) for t in spanning_trees(g)})


@pytest.mark.parametrize("g", [cycle_graph(3), ws_graph(3), ws_graph(4), ws_graph(5)], ids=str)
def test_psi_term_count(g):
    assert _poly_monomial_count(g) == spanning_tree_count(g)


def test_cycle_matrix_o3():
    cm = cycle_matrix(cycle_graph(3))
    assert cm.tab.shape == (1, 3)
    assert set(np.abs(cm.tab[0])) == {1}


def test_cycle_matrix_tree_rejected():
    with pytest.raises(NoCycles):
        cycle_matrix(build_graph(3, [(0, 1), (1, 2)]))


def _rows_are_cycles(g, tab):
    for row in tab:
        flow = np.zeros(g.n_vertices, dtype=np.int64)
        for e, s in enumerate(row):
            a, b = g.edges[e]
            flow[a] -= s
            flow[b] += s
        if flow.any():
            return False
    return True


@pytest.mark.parametrize("g", [cycle_graph(5), ws_graph(3), ws_graph(6), xstrip_graph()], ids=str)
def test_tab_rows_are_cycles(g):
    cm = cycle_matrix(g)
    assert _rows_are_cycles(g, cm.tab)
    for i, c in enumerate(cm.chords):
        assert cm.tab[i, c] == 1
        assert not cm.tab[np.arange(cm.n_loops) != i, c].any()


def test_xstrip_reproduces_reference_table():
    g = xstrip_graph()
    assert (g.n_edges, g.h1, g.n_vertices) == (14, 7, 8)
    tab = cycle_matrix(g).tab
    assert np.array_equal(tab, XSTRIP_TAB)
    assert np.array_equal(tab != 0, XSTRIP_TAB != 0)


def test_xstrip_table_rows_are_cycles():
    assert _rows_are_cycles(xstrip_graph(), XSTRIP_TAB)


def test_greedy_basis_on_xstrip_also_gives_psi():
    # any fundamental basis yields the same polynomial
    g = xstrip_graph()
    f = make_field(11)
    rng = np.random.default_rng(8)
    pts = rng.integers(0, 11, size=(200, 14))
    greedy = build_graph(g.n_vertices, g.edges)
    assert np.array_equal(psi_det(g, pts, f), psi_det(greedy, pts, f))


@pytest.mark.parametrize(
    "g,expected",
    [(ws_graph(3), True), (ws_graph(4), True), (cycle_graph(4), False), (xstrip_graph(), True)],
    ids=["ws3", "ws4", "O4", "xstrip"],
)
def test_primitive_log_divergence(g, expected):
    assert is_primitively_log_divergent(g) is expected


def test_log_divergence_cap():
    with pytest.raises(TooManyEdges):
        is_primitively_log_divergent(ws_graph(13))


def test_graph_text_round_trip(tmp_path):
    g = ws_graph(4)
    text = format_graph(g)
    h = parse_graph(text)
    assert h.edges == g.edges and h.n_vertices == g.n_vertices
    with pytest.raises(ValueError):
        parse_graph("E 0 1\n")


def test_tree_sum_vectorized_matches_scalar_oracle():
    g = ws_graph(3)
    f = make_field(5)
    trees = spanning_trees(g)
    rng = np.random.default_rng(1)
    pts = rng.integers(0, 5, size=(50, 6))
    got = psi_tree_sum(g, pts, f)
    for row, val in zip(pts, got):
        acc = 0
        for tree in trees:
            m = 1
            for e in set(range(6)) - set(tree):
                m = m * int(row[e])
            acc += m
        assert acc % 5 == val
