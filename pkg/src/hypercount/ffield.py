"""Arithmetic in finite fields F_q, q = p^k.

Elements are stored as dense residue vectors (low degree first) modulo a
monic irreducible polynomial.  Every element also has a canonical integer
index ``sum(r_i * p**i)``; the counting kernels work exclusively on these
indices through precomputed operation tables (see :func:`field_tables`).
Index 0 is always zero and index 1 is always one.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DivisionByZero, NotAPrimePower, TooLarge

MAX_Q = 2**20
# operation tables are q x q, so kernels are limited to modest fields
MAX_TABLE_Q = 1024


def prime_power(q: int) -> tuple[int, int]:
    """(p, k) with q = p**k; raises NotAPrimePower otherwise."""
    if q < 2:
        raise NotAPrimePower(f"{q} is not a prime power")
    p = None
    d = 2
    n = q
    while d * d <= n:
        if n % d == 0:
            p = d
            break
        d += 1
    if p is None:
        return q, 1
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    if n != 1:
        raise NotAPrimePower(f"{q} has at least two distinct prime factors")
    return p, k


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except NotAPrimePower:
        return False
    return True


# -- polynomials over F_p as lists of residues, low degree first ------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    r = _trim(list(a))
    dm = len(m) - 1
    while len(r) - 1 >= dm:
        c = r[-1]
        shift = len(r) - 1 - dm
        for i, mi in enumerate(m):
            r[shift + i] = (r[shift + i] - c * mi) % p
        _trim(r)
    return r


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    k = len(modulus) - 1
    if k <= 1:
        return True
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(modulus, list(low) + [1], p):
                return False
    return True


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    # lexicographic in (c_0, c_1, ..., c_{k-1}); product() varies the last slot fastest
    for low in itertools.product(range(p), repeat=k):
        if low[0] == 0:
            continue
        cand = tuple(low) + (1,)
        if _is_irreducible(cand, p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {k} over F_{p}")


@dataclass(frozen=True)
class FieldElement:
    residues: tuple[int, ...]

    def __repr__(self) -> str:
        if len(self.residues) == 1:
            return f"FieldElement({self.residues[0]})"
        return f"FieldElement{self.residues}"


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q with q = p**k.

    ``modulus`` holds the k+1 coefficients (low degree first) of the monic
    irreducible polynomial defining the extension, or ``None`` when k == 1.
    """

    p: int
    k: int
    modulus: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        p, k = prime_power(self.p)
        if k != 1:
            raise NotAPrimePower(f"characteristic {self.p} is not prime")
        if self.k < 1:
            raise ValueError("extension degree must be >= 1")
        if self.p**self.k > MAX_Q:
            raise TooLarge(f"q = {self.p}^{self.k} exceeds {MAX_Q}")
        if self.k == 1:
            if self.modulus is not None:
                raise ValueError("prime fields take no modulus")
            return
        m = self.modulus
        if m is None or len(m) != self.k + 1 or m[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if any(not 0 <= c < self.p for c in m):
            raise ValueError("modulus coefficients must be residues mod p")
        if not _is_irreducible(m, self.p):
            raise ValueError(f"modulus {m} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.k

    def __str__(self) -> str:
        return f"F_{self.q}"

    # -- encoding -----------------------------------------------------------

    def element(self, value: int | Sequence[int] | FieldElement) -> FieldElement:
        """Build an element from its canonical index or its residue vector."""
        if isinstance(value, FieldElement):
            res = value.residues
        elif isinstance(value, (int, np.integer)):
            value = int(value)
            if not 0 <= value < self.q:
                raise ValueError(f"index {value} out of range for {self}")
            res = tuple((value // self.p**i) % self.p for i in range(self.k))
        else:
            res = tuple(int(r) for r in value)
        if len(res) != self.k or any(not 0 <= r < self.p for r in res):
            raise ValueError(f"invalid encoding {res} for {self}")
        return FieldElement(res)

    def index(self, a: FieldElement) -> int:
        return sum(r * self.p**i for i, r in enumerate(a.residues))

    def embed(self, n: int) -> FieldElement:
        """Image of the integer ``n`` under Z -> F_q."""
        return FieldElement((n % self.p,) + (0,) * (self.k - 1))

    @property
    def zero(self) -> FieldElement:
        return FieldElement((0,) * self.k)

    @property
    def one(self) -> FieldElement:
        return self.embed(1)

    # -- arithmetic ---------------------------------------------------------

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        p = self.p
        return FieldElement(tuple((x + y) % p for x, y in zip(a.residues, b.residues)))

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        p = self.p
        return FieldElement(tuple((x - y) % p for x, y in zip(a.residues, b.residues)))

    def neg(self, a: FieldElement) -> FieldElement:
        return FieldElement(tuple(-x % self.p for x in a.residues))

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        p = self.p
        if self.k == 1:
            return FieldElement(((a.residues[0] * b.residues[0]) % p,))
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(a.residues):
            if x:
                for j, y in enumerate(b.residues):
                    prod[i + j] += x * y
        r = _poly_mod([c % p for c in prod], self.modulus, p)
        return FieldElement(tuple(r) + (0,) * (self.k - len(r)))

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: FieldElement) -> FieldElement:
        if not any(a.residues):
            raise DivisionByZero(f"inverse of zero in {self}")
        if self.k == 1:
            return FieldElement((pow(a.residues[0], -1, self.p),))
        return self.pow(a, self.q - 2)

    def elements(self) -> Iterator[FieldElement]:
        return enumerate_elements(self)


@functools.lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Return F_q, choosing the lexicographically smallest modulus when q is not prime."""
    if q > MAX_Q:
        raise TooLarge(f"q = {q} exceeds {MAX_Q}")
    p, k = prime_power(q)
    if k == 1:
        return FieldSpec(p, 1)
    return FieldSpec(p, k, _smallest_irreducible(p, k))


def field_arith(spec: FieldSpec, op: str, a: FieldElement, b: FieldElement | None = None) -> FieldElement:
    if op in ("add", "mul", "sub"):
        if b is None:
            raise ValueError(f"{op} needs two operands")
        return getattr(spec, op)(a, b)
    if op in ("neg", "inv"):
        return getattr(spec, op)(a)
    raise ValueError(f"unknown field operation {op!r}")


def enumerate_elements(spec: FieldSpec) -> Iterator[FieldElement]:
    """Yield every element once, in canonical index order (0, 1, ...)."""
    for i in range(spec.q):
        yield spec.element(i)


class FieldTables(NamedTuple):
    """Operation tables over canonical indices, as consumed by the kernels."""

    q: int
    p: int
    add: np.ndarray
    sub: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray  # inv[0] is 0 and must never be used


@functools.lru_cache(maxsize=16)
def field_tables(spec: FieldSpec) -> FieldTables:
    q, p, k = spec.q, spec.p, spec.k
    if q > MAX_TABLE_Q:
        raise TooLarge(f"operation tables are limited to q <= {MAX_TABLE_Q}")
    idx = np.arange(q, dtype=np.int64)
    digits = np.stack([(idx // p**i) % p for i in range(k)])  # (k, q)
    weights = np.array([p**i for i in range(k)], dtype=np.int64)

    def combine(sign: int) -> np.ndarray:
        d = (digits[:, :, None] + sign * digits[:, None, :]) % p
        return np.tensordot(weights, d, axes=1)

    add = combine(1)
    sub = combine(-1)
    neg = sub[0].copy()

    if k == 1:
        mul = (idx[:, None] * idx[None, :]) % p
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = [pow(int(a), -1, p) for a in range(1, q)]
    else:
        # discrete log tables from a generator of the multiplicative group
        exp = _exp_table(spec)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        s = (log[1:, None] + log[None, 1:]) % (q - 1)
        mul = np.zeros((q, q), dtype=np.int64)
        mul[1:, 1:] = exp[s]
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(-log[1:]) % (q - 1)]
    tabs = FieldTables(q, p, add, sub, mul.astype(np.int64), neg, inv)
    for arr in tabs[2:]:
        arr.setflags(write=False)
    return tabs


def _exp_table(spec: FieldSpec) -> np.ndarray:
    q = spec.q
    factors = [d for d in range(2, q) if (q - 1) % d == 0 and all(d % e for e in range(2, d))]
    for g in range(2, q):
        ge = spec.element(g)
        if all(spec.pow(ge, (q - 1) // f) != spec.one for f in factors):
            break
    else:  # pragma: no cover
        raise AssertionError("no generator found")
    exp = np.zeros(q - 1, dtype=np.int64)
    cur = spec.one
    for i in range(q - 1):
        exp[i] = spec.index(cur)
        cur = spec.mul(cur, ge)
    return exp


@functools.lru_cache(maxsize=16)
def quadratic_root_tables(spec: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """Roots of the monic quadratics x^2 + b x + c for every (b, c).

    Returns ``(count, roots)`` with ``count[b, c]`` in {0, 1, 2} and the
    distinct roots in ``roots[b, c, :count]``.
    """
    t = field_tables(spec)
    q = t.q
    count = np.zeros((q, q), dtype=np.int64)
    roots = np.zeros((q, q, 2), dtype=np.int64)
    bs = np.arange(q)
    for x in range(q):
        # x is a root of x^2 + b x + c  iff  c = -(x^2 + b x)
        cs = t.neg[t.add[t.mul[x, x], t.mul[bs, x]]]
        slot = count[bs, cs]
        roots[bs, cs, slot] = x
        count[bs, cs] += 1
    return count, roots
