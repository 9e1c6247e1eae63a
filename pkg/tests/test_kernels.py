import numpy as np
import pytest

from hypercount import kernels
from hypercount.ffield import make_field
from hypercount.graphcore import cycle_matrix, ws_graph
from hypercount.matteval import EvaluatedMatrix, determinant, ws_terms, xstrip_terms

BOTH = pytest.mark.skipif(len(kernels.available_backends()) < 2, reason="numba not installed")


def test_backend_selection():
    assert kernels.backend() in kernels.available_backends()
    with pytest.raises(ValueError):
        with kernels.use_backend("fortran"):
            pass


@pytest.mark.parametrize("q", [2, 4, 7, 9])
def test_det_batch_vs_python(backend, q, rng):
    f = make_field(q)
    mats = rng.integers(0, q, size=(200, 5, 5))
    mats[::7, 2] = 0  # some singular matrices
    got = kernels.det_batch(mats, f)
    for m, d in zip(mats, got):
        # oracle: Python-level elimination on FieldElements
        want = _python_det(m, f)
        assert d == want


def _python_det(m, f):
    a = [[f.element(int(x)) for x in row] for row in m]
    n = len(a)
    det = f.one
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != f.zero), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = f.neg(det)
        det = f.mul(det, a[c][c])
        inv = f.inv(a[c][c])
        for r in range(c + 1, n):
            fac = f.mul(a[r][c], inv)
            a[r] = [f.sub(x, f.mul(fac, y)) for x, y in zip(a[r], a[c])]
    return f.index(det)


@BOTH
@pytest.mark.parametrize("q", [2, 3, 5])
def test_backends_agree_on_pencils(q, rng):
    f = make_field(q)
    terms = cycle_matrix(ws_graph(4)).terms()
    pts = rng.integers(0, q, size=(500, 8))
    out = {}
    for name in kernels.available_backends():
        with kernels.use_backend(name):
            out[name] = (kernels.pencil_dets(pts, 4, terms, f), kernels.count_pencil_zeros(3, 6, ws_terms(3), f))
    a, b = out.values()
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]


@BOTH
@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("mode", ["baseline", "accelerated"])
def test_backends_agree_on_shards(q, mode):
    f = make_field(q)
    shards = [(a1, a3) for a1 in range(q) for a3 in range(q)][:4]
    res = {}
    for name in kernels.available_backends():
        with kernels.use_backend(name):
            res[name] = [kernels.xstrip_shard(mode, a1, a3, xstrip_terms(), f) for a1, a3 in shards]
    a, b = res.values()
    assert a == b


@BOTH
def test_backends_agree_on_midform():
    f = make_field(2)
    res = []
    for name in kernels.available_backends():
        with kernels.use_backend(name):
            res.append(kernels.xstrip_midform(xstrip_terms(), f))
    assert res[0] == res[1] == (1084, 2068)


def test_empty_matrix_determinant():
    f = make_field(3)
    assert determinant(EvaluatedMatrix(f, np.zeros((0, 0), dtype=np.int64))) == f.one


def test_unknown_mode():
    with pytest.raises(ValueError):
        kernels.xstrip_shard("turbo", 0, 0, xstrip_terms(), make_field(2))
