"""The explicit XStrip and wheel matrices, their minors, and determinants over F_q.

Variables of the XStrip matrix are named ``A0..A6`` and ``B0..B6``; the
``B_i`` sit on the diagonal.  ``I_k`` is the trailing k x k principal minor
and ``G_k = -I_{k+1}|_{B_{6-k}=0}``, so that ``I_{k+1} = B_{6-k} I_k - G_k``.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import MissingVariable
from .ffield import FieldElement, FieldSpec, field_tables
from .kernels import Terms

XSTRIP_VARS = tuple(f"A{i}" for i in range(7)) + tuple(f"B{i}" for i in range(7))
_VAR_INDEX = {name: i for i, name in enumerate(XSTRIP_VARS)}

# entries of the XStrip matrix, row by row
_XSTRIP_ENTRIES = (
    ("B0", "A0", "A2", "A1", "0", "0", "A1"),
    ("A0", "B1", "A2+A3", "A3", "0", "A3", "A3"),
    ("A2", "A2+A3", "B2", "A3-A4", "A4", "A3", "A3"),
    ("A1", "A3", "A3-A4", "B3", "A4", "A3", "A3-A1"),
    ("0", "0", "A4", "A4", "B4", "A5", "A6"),
    ("0", "A3", "A3", "A3", "A5", "B5", "A3+A6"),
    ("A1", "A3", "A3", "A3-A1", "A6", "A3+A6", "B6"),
)


def _linear_form(text: str) -> dict[int, int]:
    form: dict[int, int] = {}
    if text == "0":
        return form
    sign = 1
    token = ""
    for ch in text + "+":
        if ch in "+-":
            if token:
                form[_VAR_INDEX[token]] = form.get(_VAR_INDEX[token], 0) + sign
            sign = 1 if ch == "+" else -1
            token = ""
        else:
            token += ch
    return form


@functools.lru_cache(maxsize=None)
def xstrip_symbolic() -> np.ndarray:
    """Integer tensor C (7, 7, 14) with entry (i, j) = sum_v C[i, j, v] x_v."""
    C = np.zeros((7, 7, 14), dtype=np.int64)
    for i, row in enumerate(_XSTRIP_ENTRIES):
        for j, text in enumerate(row):
            for v, c in _linear_form(text).items():
                C[i, j, v] = c
    C.setflags(write=False)
    return C


def _terms_from_symbolic(C: np.ndarray) -> Terms:
    i, j, v = np.nonzero(C)
    return Terms.from_list(list(zip(i, j, v, C[i, j, v])))


@functools.lru_cache(maxsize=None)
def xstrip_terms() -> Terms:
    return _terms_from_symbolic(xstrip_symbolic())


def ws_symbolic(m: int) -> np.ndarray:
    """Tensor for the m x m cyclic tridiagonal wheel matrix; x = (A0..A_{m-1}, B0..B_{m-1})."""
    if m < 3:
        raise ValueError("wheel matrix needs m >= 3")
    C = np.zeros((m, m, 2 * m), dtype=np.int64)
    for i in range(m):
        C[i, i, m + i] = 1
    for i in range(m - 1):
        C[i, i + 1, i] = C[i + 1, i, i] = 1
    C[0, m - 1, m - 1] = C[m - 1, 0, m - 1] = 1
    return C


@functools.lru_cache(maxsize=None)
def ws_terms(m: int) -> Terms:
    return _terms_from_symbolic(ws_symbolic(m))


# -- evaluated matrices --------------------------------------------------------

@dataclass(frozen=True)
class EvaluatedMatrix:
    """Square matrix over F_q stored as canonical element indices."""

    spec: FieldSpec
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("matrix must be square")

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, ij: tuple[int, int]) -> FieldElement:
        return self.spec.element(int(self.entries[ij]))

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))

    def principal(self, rows: Sequence[int]) -> "EvaluatedMatrix":
        rows = list(rows)
        return EvaluatedMatrix(self.spec, self.entries[np.ix_(rows, rows)])

    def trailing(self, k: int) -> "EvaluatedMatrix":
        return self.principal(range(self.m - k, self.m))


def determinant(m: EvaluatedMatrix) -> FieldElement:
    """Determinant by Gaussian elimination with row pivoting."""
    if m.m == 0:
        return m.spec.one
    return m.spec.element(int(kernels.det_batch(m.entries[None, :, :], m.spec)[0]))


def _evaluate(C: np.ndarray, x: Sequence[FieldElement], spec: FieldSpec) -> EvaluatedMatrix:
    m = C.shape[0]
    out = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            acc = spec.zero
            for v in np.nonzero(C[i, j])[0]:
                acc = spec.add(acc, spec.mul(spec.embed(int(C[i, j, v])), x[v]))
            out[i, j] = spec.index(acc)
    return EvaluatedMatrix(spec, out)


def _coerce(values: Sequence[FieldElement | int], spec: FieldSpec) -> list[FieldElement]:
    return [spec.element(v) for v in values]


def xstrip_matrix(a: Sequence[FieldElement | int], b: Sequence[FieldElement | int], spec: FieldSpec) -> EvaluatedMatrix:
    """The XStrip matrix at A = a (A0..A6), B = b (B0..B6)."""
    if len(a) != 7 or len(b) != 7:
        raise ValueError("need 7 A-values and 7 B-values")
    mat = _evaluate(xstrip_symbolic(), _coerce(a, spec) + _coerce(b, spec), spec)
    assert mat.is_symmetric()
    return mat


def ws_matrix(m: int, a: Sequence[FieldElement | int], b: Sequence[FieldElement | int], spec: FieldSpec) -> EvaluatedMatrix:
    """Cyclic tridiagonal matrix: diagonal B, off-diagonal A0..A_{m-2}, corners A_{m-1}."""
    if m < 3:
        raise ValueError("wheel matrix needs m >= 3")
    if len(a) != m or len(b) != m:
        raise ValueError(f"need {m} A-values and {m} B-values")
    mat = _evaluate(ws_symbolic(m), _coerce(a, spec) + _coerce(b, spec), spec)
    assert mat.is_symmetric()
    return mat


# -- XStrip minors -------------------------------------------------------------

class MinorSelector(enum.Enum):
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    I4 = "I4"
    I5 = "I5"
    I6 = "I6"
    I7 = "I7"
    G6 = "G6"
    G5 = "G5"
    G4 = "G4"
    G6_TILDE = "G6~"
    G6_TILDE_1 = "G6~1"
    G6_TILDE_2 = "G6~2"
    FULL = "full"


# selector -> (size of the trailing block, variables pinned to fixed values)
_MINOR_RECIPES: dict[MinorSelector, tuple[int, dict[str, int]]] = {
    **{MinorSelector(f"I{k}"): (k, {}) for k in range(1, 8)},
    MinorSelector.FULL: (7, {}),
    MinorSelector.G6: (7, {"B0": 0}),
    MinorSelector.G5: (6, {"B1": 0}),
    MinorSelector.G4: (5, {"B2": 0}),
    MinorSelector.G6_TILDE: (7, {"B0": 0, "A0": 0}),
    MinorSelector.G6_TILDE_2: (7, {"B0": 0, "A0": 0, "B1": 0}),
}
_NEGATED = {MinorSelector.G6, MinorSelector.G5, MinorSelector.G4, MinorSelector.G6_TILDE, MinorSelector.G6_TILDE_2}


def minor_variables(sel: MinorSelector | str) -> frozenset[str]:
    """Variables the selected minor reads."""
    sel = MinorSelector(sel)
    if sel is MinorSelector.G6_TILDE_1:
        return minor_variables(MinorSelector.G6_TILDE_2)
    size, pins = _MINOR_RECIPES[sel]
    block = xstrip_symbolic()[7 - size:, 7 - size:, :]
    used = {XSTRIP_VARS[v] for v in np.nonzero(block.any(axis=(0, 1)))[0]}
    return frozenset(used - set(pins))


@functools.lru_cache(maxsize=None)
def _block_terms(size: int) -> Terms:
    return _terms_from_symbolic(xstrip_symbolic()[7 - size:, 7 - size:, :])


def xstrip_minor_batch(sel: MinorSelector | str, points: np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Vectorized :func:`xstrip_minor`: rows of ``points`` are (A0..A6, B0..B6) as field indices.

    Pinned variables of the selector override whatever the rows hold.
    """
    sel = MinorSelector(sel)
    X = np.array(points, dtype=np.int64, ndmin=2, copy=True)
    if X.shape[1] != len(XSTRIP_VARS):
        raise ValueError(f"points need {len(XSTRIP_VARS)} columns")
    if sel is MinorSelector.G6_TILDE_1:
        X[:, _VAR_INDEX["B1"]] = 1
        at1 = xstrip_minor_batch(MinorSelector.G6_TILDE, X, spec)
        X[:, _VAR_INDEX["B1"]] = 0
        at0 = xstrip_minor_batch(MinorSelector.G6_TILDE, X, spec)
        return field_tables(spec).sub[at1, at0]
    size, pins = _MINOR_RECIPES[sel]
    for name, v in pins.items():
        X[:, _VAR_INDEX[name]] = v
    value = kernels.pencil_dets(X, size, _block_terms(size), spec)
    return field_tables(spec).neg[value] if sel in _NEGATED else value


def xstrip_minor(sel: MinorSelector | str, point: Mapping[str, FieldElement | int], spec: FieldSpec) -> FieldElement:
    """Evaluate I_k, G_k, G~6 or its B1-coefficient/constant part at ``point``.

    ``point`` maps variable names to values; variables the minor does not
    read may be omitted.
    """
    sel = MinorSelector(sel)
    missing = minor_variables(sel) - set(point)
    if missing:
        raise MissingVariable(f"{sel.value} needs {sorted(missing)}")
    if sel is MinorSelector.G6_TILDE_1:
        at1 = xstrip_minor(MinorSelector.G6_TILDE, {**point, "B1": 1}, spec)
        at0 = xstrip_minor(MinorSelector.G6_TILDE, {**point, "B1": 0}, spec)
        return spec.sub(at1, at0)
    size, pins = _MINOR_RECIPES[sel]
    vals = {**{name: spec.element(v) for name, v in point.items()}, **{n: spec.element(v) for n, v in pins.items()}}
    x = [vals.get(name, spec.zero) for name in XSTRIP_VARS]
    value = determinant(xstrip_matrix(x[:7], x[7:], spec).trailing(size))
    return spec.neg(value) if sel in _NEGATED else value


def xstrip_substitution() -> np.ndarray:
    """Integer matrix S (14 x 14) with (A0..A6, B0..B6) = S @ (T1..T14).

    Read off the cycle-matrix pencil of the XStrip graph: the B_i are its
    diagonal entries and each A_j is one off-diagonal entry.
    """
    from .graphcore import cycle_matrix, xstrip_graph

    C = cycle_matrix(xstrip_graph()).symbolic()
    a_entries = ((0, 1), (0, 3), (0, 2), (1, 3), (2, 4), (4, 5), (4, 6))
    rows = [C[i, j] for i, j in a_entries] + [C[i, i] for i in range(7)]
    return np.array(rows, dtype=np.int64)


# -- tridiagonal determinant identity -----------------------------------------

def _tridiagonal(d: Sequence[FieldElement], e: Sequence[FieldElement], spec: FieldSpec) -> EvaluatedMatrix:
    n = len(d)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        out[i, i] = spec.index(d[i])
    for i in range(n - 1):
        out[i, i + 1] = out[i + 1, i] = spec.index(e[i])
    return EvaluatedMatrix(spec, out)


def desnanot_jacobi_check(d: Sequence[FieldElement | int], e: Sequence[FieldElement | int], spec: FieldSpec) -> bool:
    """Check det(1..n-1) det(2..n) - (prod e)^2 = det(1..n) det(2..n-1) for a tridiagonal matrix."""
    d = _coerce(d, spec)
    e = _coerce(e, spec)
    n = len(d)
    if n < 3 or len(e) != n - 1:
        raise ValueError("need n >= 3 diagonal and n - 1 off-diagonal values")
    mat = _tridiagonal(d, e, spec)
    full = determinant(mat)
    drop_first = determinant(mat.principal(range(1, n)))
    drop_last = determinant(mat.principal(range(n - 1)))
    interior = determinant(mat.principal(range(1, n - 1)))
    s = spec.one
    for x in e:
        s = spec.mul(s, x)
    lhs = spec.sub(spec.mul(drop_last, drop_first), spec.mul(s, s))
    return lhs == spec.mul(full, interior)


def desnanot_jacobi_batch(d: np.ndarray, e: np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Vectorized :func:`desnanot_jacobi_check` over rows of ``d`` (N, n) and ``e`` (N, n-1)."""
    d = np.asarray(d, dtype=np.int64)
    e = np.asarray(e, dtype=np.int64)
    N, n = d.shape
    if n < 3 or e.shape != (N, n - 1):
        raise ValueError("need n >= 3 diagonal and n - 1 off-diagonal values per row")
    t = field_tables(spec)
    mats = np.zeros((N, n, n), dtype=np.int64)
    r = np.arange(n)
    mats[:, r, r] = d
    mats[:, r[:-1], r[1:]] = e
    mats[:, r[1:], r[:-1]] = e
    full = kernels.det_batch(mats, spec)
    drop_first = kernels.det_batch(mats[:, 1:, 1:], spec)
    drop_last = kernels.det_batch(mats[:, :-1, :-1], spec)
    interior = kernels.det_batch(mats[:, 1:-1, 1:-1], spec) if n > 3 else d[:, 1]
    s = np.ones(N, dtype=np.int64)
    for i in range(n - 1):
        s = t.mul[s, e[:, i]]
    lhs = t.sub[t.mul[drop_last, drop_first], t.mul[s, s]]
    return lhs == t.mul[full, interior]
