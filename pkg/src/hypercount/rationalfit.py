"""Exact Lagrange interpolation over Q and the reduced-form polynomiality test.

A point count of the shape ``F(q) = q**13 + q**2 * Ft(q)`` with ``deg Ft <= 10``
is pinned down by 11 values.  :func:`reduced_fit` fits ``Ft`` through the first
11 samples and checks the rest; a single mismatch proves that no polynomial
of that shape reproduces the counts.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DivisibilityViolation, DuplicateAbscissa, TooFewPoints

FIT_POINTS = 11
LEAD_DEGREE = 13


class ExactPolynomial:
    """Polynomial with rational coefficients, ``coeffs[i]`` multiplying x**i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int] = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @property
    def degree(self) -> int:
        # the zero polynomial reports -1
        return len(self.coeffs) - 1

    def __call__(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    evaluate = __call__

    def __add__(self, other: "ExactPolynomial") -> "ExactPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return ExactPolynomial(x + y for x, y in zip(a, b))

    def __mul__(self, other: "ExactPolynomial | Fraction | int") -> "ExactPolynomial":
        if not isinstance(other, ExactPolynomial):
            return ExactPolynomial(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return ExactPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return ExactPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExactPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"ExactPolynomial({[str(c) for c in self.coeffs]})"

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_strings(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]


def lagrange_fit(points: Sequence[tuple[int | Fraction, int | Fraction]]) -> ExactPolynomial:
    """Unique polynomial of degree < len(points) through ``points``."""
    if not points:
        raise ValueError("need at least one point")
    xs = [Fraction(x) for x, _ in points]
    ys = [Fraction(y) for _, y in points]
    if len(set(xs)) != len(xs):
        raise DuplicateAbscissa("abscissae must be pairwise distinct")
    result = ExactPolynomial()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = ExactPolynomial([1])
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * ExactPolynomial([-xj, 1])
                denom *= xi - xj
        result = result + basis * (yi / denom)
    return result


# -- the reduced-form test -------------------------------------------------------

@dataclass(frozen=True)
class HeldOut:
    q: int
    predicted: int | Fraction
    observed: int

    @property
    def match(self) -> bool:
        return self.predicted == self.observed


@dataclass(frozen=True)
class FitReport:
    samples: tuple[tuple[int, int], ...]
    reduced: ExactPolynomial
    held_out: tuple[HeldOut, ...]
    provenance: Mapping[int, str] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "consistent" if all(h.match for h in self.held_out) else "non-polynomial-witness"

    def to_json(self) -> dict:
        return {
            "samples": [
                {"q": q, "count": str(c), **({"source": self.provenance[q]} if q in self.provenance else {})}
                for q, c in self.samples
            ],
            "reduced_coefficients": self.reduced.to_strings(),
            "held_out": [
                {"q": h.q, "predicted": _exact_str(h.predicted), "observed": str(h.observed), "match": h.match}
                for h in self.held_out
            ],
            "verdict": self.verdict,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _exact_str(x: int | Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _pairs(records: Iterable) -> list[tuple[int, int]]:
    """Accept CountRecords, (q, count) pairs or a {q: count} mapping."""
    if isinstance(records, Mapping):
        return [(int(q), int(c)) for q, c in records.items()]
    out = []
    for r in records:
        if hasattr(r, "q") and hasattr(r, "count"):
            out.append((int(r.q), int(r.count)))
        else:
            q, c = r
            out.append((int(q), int(c)))
    return out


def reduced_value(q: int, count: int) -> int:
    """(count - q^13) / q^2, exact; raises DivisibilityViolation if q^2 does not divide count."""
    if count % (q * q):
        raise DivisibilityViolation(f"q^2 = {q * q} does not divide count {count} at q = {q}")
    return (count - q**LEAD_DEGREE) // (q * q)


def reduced_fit(records, fit_indices: Sequence[int] | None = None, provenance: Mapping[int, str] | None = None) -> FitReport:
    """Fit Ft through 11 samples and test the held-out ones.

    By default the first 11 records are used for fitting; ``fit_indices``
    selects a different subset (positions into ``records``).
    """
    pairs = _pairs(records)
    qs = [q for q, _ in pairs]
    if len(set(qs)) != len(qs):
        raise DuplicateAbscissa("records must be at distinct q")
    reduced = [reduced_value(q, c) for q, c in pairs]
    if len(pairs) < FIT_POINTS + 1:
        raise TooFewPoints(f"need at least {FIT_POINTS + 1} records, got {len(pairs)}")
    if fit_indices is None:
        fit_indices = range(FIT_POINTS)
    fit_indices = sorted(set(fit_indices))
    if len(fit_indices) != FIT_POINTS:
        raise ValueError(f"exactly {FIT_POINTS} fitting points are required")
    ft = lagrange_fit([(qs[i], reduced[i]) for i in fit_indices])
    held = []
    for i, (q, c) in enumerate(pairs):
        if i in fit_indices:
            continue
        pred = q**LEAD_DEGREE + q * q * ft(q)
        held.append(HeldOut(q, int(pred) if pred.denominator == 1 else pred, c))
    return FitReport(tuple(pairs), ft, tuple(held), dict(provenance or {}))


def subset_verdicts(records) -> list[str]:
    """Verdict for every 11-point fitting subset of the records."""
    pairs = _pairs(records)
    return [reduced_fit(pairs, idx).verdict for idx in itertools.combinations(range(len(pairs)), FIT_POINTS)]


@dataclass(frozen=True)
class DivisibilityRow:
    q: int
    count: int

    @property
    def passed(self) -> bool:
        return self.count % (self.q * self.q) == 0


def divisibility_audit(records) -> list[DivisibilityRow]:
    return [DivisibilityRow(q, c) for q, c in _pairs(records)]
