import itertools

import numpy as np
import pytest

from hypercount.errors import MissingVariable
from hypercount.ffield import field_tables, make_field
from hypercount.graphcore import cycle_matrix, xstrip_graph
from hypercount.matteval import (
    XSTRIP_VARS,
    EvaluatedMatrix,
    MinorSelector,
    desnanot_jacobi_check,
    determinant,
    minor_variables,
    ws_matrix,
    xstrip_matrix,
    xstrip_minor,
    xstrip_minor_batch,
    xstrip_substitution,
    xstrip_symbolic,
)

F2, F3, F5, F7 = (make_field(q) for q in (2, 3, 5, 7))


def _cofactor_det(a, p):
    # independent oracle: Laplace expansion over the integers, reduced mod p
    n = len(a)
    if n == 1:
        return a[0][0] % p
    return sum((-1) ** j * a[0][j] * _cofactor_det([r[:j] + r[j + 1:] for r in a[1:]], p) for j in range(n)) % p


def _point(spec, rng, **fixed):
    pt = {v: int(rng.integers(0, spec.q)) for v in XSTRIP_VARS}
    pt.update(fixed)
    return pt


def test_determinant_examples():
    eye = EvaluatedMatrix(F5, np.eye(7, dtype=np.int64))
    assert determinant(eye) == F5.one
    m = np.arange(49, dtype=np.int64).reshape(7, 7) % 5
    m[3] = 0
    assert determinant(EvaluatedMatrix(F5, m)) == F5.zero
    assert determinant(ws_matrix(3, [1, 1, 1], [1, 1, 1], F5)) == F5.zero


def test_determinant_matches_cofactor(rng):
    for _ in range(100):
        n = int(rng.integers(1, 6))
        a = rng.integers(0, 7, size=(n, n))
        assert determinant(EvaluatedMatrix(F7, a)) == F7.element(_cofactor_det(a.tolist(), 7))


def test_xstrip_matrix_examples():
    m = xstrip_matrix([0] * 7, [1] * 7, F5)
    assert np.array_equal(m.entries, np.eye(7, dtype=np.int64))
    a = [3, 0, 0, 0, 0, 0, 0]
    m = xstrip_matrix(a, [0] * 7, F5)
    assert m.entries[0, 1] == m.entries[1, 0] == 3
    m = xstrip_matrix([0, 0, 1, 1, 0, 0, 0], [0] * 7, F2)
    assert m.entries[1, 2] == 0


def test_xstrip_matrix_symmetric_and_composite_entries():
    C = xstrip_symbolic()
    assert np.array_equal(C, C.transpose(1, 0, 2))
    idx = {v: i for i, v in enumerate(XSTRIP_VARS)}
    assert C[2, 3, idx["A3"]] == 1 and C[2, 3, idx["A4"]] == -1
    assert C[3, 6, idx["A3"]] == 1 and C[3, 6, idx["A1"]] == -1
    assert C[5, 6, idx["A3"]] == 1 and C[5, 6, idx["A6"]] == 1
    assert not C[0, 4].any() and not C[1, 4].any()


def test_ws_matrix_examples():
    m = ws_matrix(3, [0, 0, 0], [1, 1, 1], F5)
    assert np.array_equal(m.entries, np.eye(3, dtype=np.int64))
    m = ws_matrix(5, [1, 2, 3, 4, 2], [0] * 5, F5)
    assert m.entries[0, 4] == m.entries[4, 0] == 2
    assert m.entries[1, 2] == 2
    with pytest.raises(ValueError):
        ws_matrix(2, [0, 0], [0, 0], F5)


def test_minor_examples(rng):
    pt = {v: (1 if v.startswith("B") else 0) for v in XSTRIP_VARS}
    for k in range(1, 8):
        assert xstrip_minor(f"I{k}", pt, F7) == F7.one
    for _ in range(10):
        pt = _point(F7, rng, **{f"A{i}": 0 for i in range(7)})
        assert xstrip_minor("G6", pt, F7) == F7.zero


def test_missing_variable():
    with pytest.raises(MissingVariable):
        xstrip_minor("I5", {"A1": 1}, F5)


def test_minor_independence_claims():
    for sel in ("I5", "G5", "G6~1", "G6~2"):
        assert not {"A0", "B0", "B1"} & minor_variables(sel)
    assert "A2" not in minor_variables("I5")
    assert "A2" in minor_variables("G5")


def _idx(name):
    return XSTRIP_VARS.index(name)


def _random_points(spec, rng, n=2000):
    return rng.integers(0, spec.q, size=(n, len(XSTRIP_VARS)))


def _grid(spec, names):
    """All points with the named coordinates free and every other coordinate 0."""
    cols = [_idx(v) for v in names]
    vals = np.array(list(itertools.product(range(spec.q), repeat=len(cols))), dtype=np.int64)
    X = np.zeros((len(vals), len(XSTRIP_VARS)), dtype=np.int64)
    X[:, cols] = vals
    return X


def test_batch_matches_scalar(rng):
    X = _random_points(F7, rng, 30)
    for sel in MinorSelector:
        got = xstrip_minor_batch(sel, X, F7)
        want = [F7.index(xstrip_minor(sel, dict(zip(XSTRIP_VARS, map(int, r))), F7)) for r in X]
        assert list(got) == want, sel


def test_i5_independent_of_a2(rng):
    X = _random_points(F7, rng, 100)
    base = xstrip_minor_batch("I5", X, F7)
    for a2 in range(7):
        Y = X.copy()
        Y[:, _idx("A2")] = a2
        assert np.array_equal(xstrip_minor_batch("I5", Y, F7), base)


@pytest.mark.parametrize("sel", ["I5", "G5", "G6~1", "G6~2"])
def test_strata_minors_ignore_a0_b0_b1(sel, rng):
    X = _random_points(F5, rng)
    base = xstrip_minor_batch(sel, X, F5)
    Y = X.copy()
    Y[:, [_idx("A0"), _idx("B0"), _idx("B1")]] = rng.integers(0, 5, size=(len(X), 3))
    assert np.array_equal(xstrip_minor_batch(sel, Y, F5), base)


@pytest.mark.parametrize("spec", [F2, F3], ids=str)
def test_pivot_identity_exhaustive(spec):
    t = field_tables(spec)
    X = _grid(spec, sorted(minor_variables("I5") | {"B2"}))
    i5 = xstrip_minor_batch("I5", X, spec)
    rhs = t.sub[t.mul[X[:, _idx("B2")], xstrip_minor_batch("I4", X, spec)], xstrip_minor_batch("G4", X, spec)]
    assert np.array_equal(i5, rhs)


def test_pivot_identity_random(rng):
    t = field_tables(F7)
    X = _random_points(F7, rng)
    rhs = t.sub[t.mul[X[:, _idx("B2")], xstrip_minor_batch("I4", X, F7)], xstrip_minor_batch("G4", X, F7)]
    assert np.array_equal(xstrip_minor_batch("I5", X, F7), rhs)


@pytest.mark.parametrize("spec", [F3, F5, F7], ids=str)
def test_linearity_anchors(spec, rng):
    t = field_tables(spec)
    X = _random_points(spec, rng)
    b0, b1 = X[:, _idx("B0")], X[:, _idx("B1")]
    full = xstrip_minor_batch("full", X, spec)
    chain = t.add[t.sub[full, t.mul[b0, xstrip_minor_batch("I6", X, spec)]], xstrip_minor_batch("G6", X, spec)]
    assert not chain.any()
    g = xstrip_minor_batch("G6~", X, spec)
    parts = t.add[t.mul[b1, xstrip_minor_batch("G6~1", X, spec)], xstrip_minor_batch("G6~2", X, spec)]
    assert np.array_equal(g, parts)
    i6 = t.sub[t.mul[b1, xstrip_minor_batch("I5", X, spec)], xstrip_minor_batch("G5", X, spec)]
    assert np.array_equal(xstrip_minor_batch("I6", X, spec), i6)


@pytest.mark.parametrize("sel", ["G5", "G6~1", "G6~2"])
def test_degree_at_most_two_in_a2(sel, rng):
    # degree <= 2 over F_7 means third finite differences vanish
    X = _random_points(F7, rng, 300)
    vals = []
    for a in range(7):
        Y = X.copy()
        Y[:, _idx("A2")] = a
        vals.append(xstrip_minor_batch(sel, Y, F7))
    v = np.stack(vals, axis=1)
    for s in range(4):
        assert not ((v[:, s + 3] - 3 * v[:, s + 2] + 3 * v[:, s + 1] - v[:, s]) % 7).any()


def test_substitution_reproduces_psi_matrix():
    # det(M_xstrip(S T)) = det(M(T)) identically: check the two symbolic tensors agree
    S = xstrip_substitution()
    C = xstrip_symbolic()
    pulled = np.einsum("ijv,vt->ijt", C, S)
    assert np.array_equal(pulled, cycle_matrix(xstrip_graph()).symbolic())


def test_substitution_is_unimodular():
    S = xstrip_substitution()
    assert round(abs(np.linalg.det(S.astype(float)))) == 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_desnanot_jacobi_examples(n):
    assert desnanot_jacobi_check([2] * n, [0] * (n - 1), F5)
    assert desnanot_jacobi_check([1, 1, 1], [1, 1], F5)


def test_desnanot_jacobi_random(rng):
    f = make_field(101)
    for n in range(3, 9):
        for _ in range(100):
            d = [int(x) for x in rng.integers(0, 101, n)]
            e = [int(x) for x in rng.integers(0, 101, n - 1)]
            assert desnanot_jacobi_check(d, e, f)
