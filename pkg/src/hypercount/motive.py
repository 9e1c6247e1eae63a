"""Polynomials in the Lefschetz class L and closed-form point counts.

Counting F_q-points factors through the Grothendieck ring, sending L to q,
so every class below doubles as a point-count polynomial.
"""
from __future__ import annotations

import functools
from typing import Iterable, Union

from .ffield import prime_power


class LPolynomial:
    """Integer polynomial in L; ``coeffs[i]`` multiplies L**i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)

    @classmethod
    def const(cls, n: int) -> "LPolynomial":
        return cls([n])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, q: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    evaluate = __call__

    @staticmethod
    def _lift(other: "LPolynomial | int") -> "LPolynomial":
        return other if isinstance(other, LPolynomial) else LPolynomial([other])

    def __add__(self, other: "LPolynomial | int") -> "LPolynomial":
        o = self._lift(other).coeffs
        n = max(len(self.coeffs), len(o))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = o + (0,) * (n - len(o))
        return LPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "LPolynomial":
        return LPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "LPolynomial | int") -> "LPolynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other: int) -> "LPolynomial":
        return self._lift(other) - self

    def __mul__(self, other: "LPolynomial | int") -> "LPolynomial":
        o = self._lift(other).coeffs
        if not self.coeffs or not o:
            return LPolynomial()
        out = [0] * (len(self.coeffs) + len(o) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(o):
                    out[i + j] += x * y
        return LPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "LPolynomial":
        if e < 0:
            raise ValueError("negative exponent")
        out = LPolynomial([1])
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LPolynomial([other])
        return isinstance(other, LPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"LPolynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        parts = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            mag = abs(c)
            if power == 0:
                body = str(mag)
            else:
                mono = "L" if power == 1 else f"L^{power}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts) if parts else "0"


L = LPolynomial([0, 1])
LPolyLike = Union[LPolynomial, int]


def proj_space(m: int) -> LPolynomial:
    """[P^m] = 1 + L + ... + L^m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return LPolynomial([1] * (m + 1))


@functools.lru_cache(maxsize=None)
def ws_y(i: int) -> tuple[LPolynomial, LPolynomial]:
    """(y_i, y'_i): classes of the tridiagonal-minor varieties Y_i and Y'_i."""
    if i < 1:
        raise ValueError("i must be >= 1")
    if i == 1:
        return LPolynomial(), LPolynomial()
    k = i - 1
    y, yp = ws_y(k)
    y_next = 1 + L * yp + L * proj_space(2 * k - 2) - L * y
    yp_next = L + y_next + L * (L - 1) * yp
    return y_next, yp_next


@functools.lru_cache(maxsize=None)
def ws_T(n: int) -> LPolynomial:
    """[T^n] from the inclusion-exclusion recurrence, [T^2] = 2."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if n == 2:
        return LPolynomial([2])
    total = proj_space(2 * n - 4)
    for i in range(1, n - 1):
        y_i = ws_y(i)[0]
        total += (L ** (2 * i - 1) - y_i * (L - 1) - 1) * (ws_y(n - i)[0] - ws_T(n - i))
        total += L ** (n - i) * (L - 1) ** (n - 2 - i) * (1 + (L - 1) * y_i)
    return total + 1 + (L - 1) * ws_y(n - 1)[0]


def ws_class(m: int) -> LPolynomial:
    """Projective class of the graph hypersurface of the wheel with m spokes."""
    if m < 3:
        raise ValueError("wheel needs m >= 3 spokes")
    n = m - 1
    yp = ws_y(n - 1)[1]
    return (
        1
        + L
        + L**2 * proj_space(2 * n - 2)
        + L**2
        + 2 * L**2 * (L - 1) * (1 + L * yp)
        - L**2 * (L - 1) * ws_T(n)
    )


# XStrip point-count polynomial matching odd prime powers
F1 = (
    L**13 + L**11 + 23 * L**10 - 78 * L**9 + 90 * L**8 - 35 * L**7 + (L - 2) * L**6
    - 34 * L**5 + 66 * L**4 - 32 * L**3 + (L - 1) * L**2
)
EVEN_CORRECTION = (L - 1) * L**2


def predicted_count(q: int) -> int:
    """Closed-form XStrip count: F1(q) for odd q, F1(q) - (q-1) q^2 for q = 2^k."""
    p, _ = prime_power(q)
    value = F1(q)
    if p == 2:
        value -= EVEN_CORRECTION(q)
    return value

