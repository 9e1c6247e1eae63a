"""Hot loops of the package, with a numba backend and a pure-numpy fallback.

The backend is chosen at import time: numba when it imports cleanly and
``HYPERCOUNT_NO_JIT`` is unset (or ``0``), numpy otherwise.  Both produce
identical results; :func:`use_backend` switches at runtime.
"""
from __future__ import annotations

import contextlib
import os
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from ..ffield import FieldSpec, field_tables, quadratic_root_tables
from . import _numpy

try:
    from . import _jit
except ImportError:  # pragma: no cover - numba missing
    _jit = None

_BACKEND = "numpy" if _jit is None or os.environ.get("HYPERCOUNT_NO_JIT", "0") not in ("", "0") else "numba"


class Terms(NamedTuple):
    """A square matrix of linear forms: entry (row, col) gets coef * x[var]."""

    row: np.ndarray
    col: np.ndarray
    var: np.ndarray
    coef: np.ndarray  # integers; reduced into the field on use

    @classmethod
    def from_list(cls, items: Sequence[tuple[int, int, int, int]]) -> "Terms":
        arr = np.array(items, dtype=np.int64).reshape(-1, 4)
        return cls(*(np.ascontiguousarray(arr[:, i]) for i in range(4)))

    def over(self, spec: FieldSpec) -> tuple[np.ndarray, ...]:
        # embedding Z -> F_q sends c to the index c mod p
        return self.row, self.col, self.var, self.coef % spec.p


def backend() -> str:
    return _BACKEND


def available_backends() -> list[str]:
    return ["numpy"] if _jit is None else ["numba", "numpy"]


@contextlib.contextmanager
def use_backend(name: str) -> Iterator[None]:
    global _BACKEND
    if name not in available_backends():
        raise ValueError(f"backend {name!r} unavailable")
    prev, _BACKEND = _BACKEND, name
    try:
        yield
    finally:
        _BACKEND = prev


def det_batch(mats: np.ndarray, spec: FieldSpec) -> np.ndarray:
    t = field_tables(spec)
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    if _BACKEND == "numba":
        return _jit.det_batch(mats, t.sub, t.mul, t.neg, t.inv)
    return _numpy.det_batch(mats, t)


def pencil_dets(points: np.ndarray, m: int, terms: Terms, spec: FieldSpec) -> np.ndarray:
    t = field_tables(spec)
    points = np.ascontiguousarray(points, dtype=np.int64)
    tt = terms.over(spec)
    if _BACKEND == "numba":
        return _jit.pencil_dets(points, m, *tt, t.add, t.sub, t.mul, t.neg, t.inv)
    return _numpy.pencil_dets(points, m, tt, t)


def count_pencil_zeros(m: int, n_vars: int, terms: Terms, spec: FieldSpec) -> int:
    t = field_tables(spec)
    tt = terms.over(spec)
    if _BACKEND == "numba":
        return int(_jit.count_pencil_zeros(m, n_vars, spec.q, *tt, t.add, t.sub, t.mul, t.neg, t.inv))
    return _numpy.count_pencil_zeros(m, n_vars, tt, t)


def xstrip_shard(mode: str, a1: int, a3: int, terms: Terms, spec: FieldSpec) -> tuple[int, int]:
    """(N_Y, N_Z) tallies over the slice of 11-space with A1 = a1, A3 = a3."""
    if mode not in ("baseline", "accelerated"):
        raise ValueError(f"unknown mode {mode!r}")
    t = field_tables(spec)
    tt = terms.over(spec)
    qcount, qroots = quadratic_root_tables(spec)
    if _BACKEND == "numba":
        if mode == "baseline":
            ny, nz = _jit.xstrip_shard_baseline(a1, a3, spec.q, *tt, t.add, t.sub, t.mul, t.neg, t.inv)
        else:
            ny, nz = _jit.xstrip_shard_accelerated(
                a1, a3, spec.q, *tt, t.add, t.sub, t.mul, t.neg, t.inv, qcount, qroots
            )
        return int(ny), int(nz)
    return _numpy.xstrip_shard(mode, a1, a3, tt, t, qcount, qroots)


def xstrip_midform(terms: Terms, spec: FieldSpec) -> tuple[int, int]:
    t = field_tables(spec)
    tt = terms.over(spec)
    if _BACKEND == "numba":
        a, b = _jit.xstrip_midform(spec.q, *tt, t.add, t.sub, t.mul, t.neg, t.inv)
        return int(a), int(b)
    return _numpy.xstrip_midform(tt, t)
