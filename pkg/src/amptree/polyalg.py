"""Floating-point polynomial algebra on [0, 1].

Evaluation, mixtures, derivatives, composition, pointwise iteration, and
fixed-point finding/classification.  Iterates are always computed pointwise
(repeated evaluation), never by symbolic self-composition, whose degree
growth d^k is infeasible; symbolic ``compose`` exists for small synthesis
jobs and documents its degree growth.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import (DegenerateInputError, InconsistentFixedPointError,
                     WeightError)

ATTRACTIVE = "ATTRACTIVE"
NON_ATTRACTIVE = "NON_ATTRACTIVE"
MARGINAL = "MARGINAL"

#: |f'(t) - 1| below this is classified MARGINAL.
CLASS_TOL = 1e-7

#: Tolerance for the endpoint fixed-point checks at 0 and 1.
ENDPOINT_TOL = 1e-9

DEFAULT_GRID = 10_000
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class Polynomial:
    """Dense float polynomial, lowest degree first; evaluated by Horner."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        n = len(c)
        while n > 1 and c[n - 1] == 0.0:
            n -= 1
        object.__setattr__(self, "coeffs", c[:n])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, p: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * p + c
        return acc

    def derivative(self) -> "Polynomial":
        if len(self.coeffs) == 1:
            return Polynomial((0.0,))
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def to_json(self) -> str:
        return json.dumps(list(self.coeffs))

    @classmethod
    def from_json(cls, text: str) -> "Polynomial":
        return cls(tuple(json.loads(text)))

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls((0.0, 1.0))


def poly_from_ints(coeffs: Iterable[int]) -> Polynomial:
    return Polynomial(tuple(float(c) for c in coeffs))


def mix(weights: Sequence[float], polys: Sequence[Polynomial]) -> Polynomial:
    """Coefficient-wise convex combination of polynomials."""
    if len(weights) != len(polys):
        raise WeightError("one weight per polynomial required")
    if any(w < 0 for w in weights):
        raise WeightError(f"negative weight in {list(weights)}")
    total = sum(weights)
    if abs(total - 1.0) > 1e-12:
        raise WeightError(f"weights sum to {total!r}, not 1")
    width = max(len(p.coeffs) for p in polys)
    out = [0.0] * width
    for w, p in zip(weights, polys):
        for i, c in enumerate(p.coeffs):
            out[i] += w * c
    return Polynomial(tuple(out))


def compose(f: Polynomial, g: Polynomial) -> Polynomial:
    """Symbolic f(g(p)).  Degree multiplies: deg(f)*deg(g)."""
    acc = Polynomial((0.0,))
    for c in reversed(f.coeffs):
        acc = _poly_mul(acc, g)
        coeffs = list(acc.coeffs)
        coeffs[0] += c
        acc = Polynomial(tuple(coeffs))
    return acc


def _poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    out = [0.0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, ai in enumerate(a.coeffs):
        if ai:
            for j, bj in enumerate(b.coeffs):
                out[i + j] += ai * bj
    return Polynomial(tuple(out))


def iterate_point(f: Polynomial | Callable[[float], float], p: float,
                  k: int) -> list[float]:
    """(p, f(p), ..., f^(k)(p)) by repeated pointwise evaluation."""
    if k < 0:
        raise DegenerateInputError("iteration count must be >= 0")
    out = [float(p)]
    x = float(p)
    for _ in range(k):
        x = f(x)
        out.append(x)
    return out


# ---------------------------------------------------------------------------
# Fixed points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPoint:
    location: float
    derivative: float
    kind: str

    @property
    def interior(self) -> bool:
        return 0.0 < self.location < 1.0


@dataclass(frozen=True)
class FixedPointReport:
    """Fixed points of a polynomial in [0,1], in increasing location order."""

    points: tuple[FixedPoint, ...]

    def locations(self) -> list[float]:
        return [fp.location for fp in self.points]

    def interior_points(self) -> list[FixedPoint]:
        return [fp for fp in self.points if fp.interior]

    def to_json(self) -> str:
        return json.dumps([
            {"location": fp.location, "derivative": fp.derivative,
             "class": fp.kind}
            for fp in self.points])


def classify(derivative: float, tol: float = CLASS_TOL) -> str:
    if derivative < 1.0 - tol:
        return ATTRACTIVE
    if derivative > 1.0 + tol:
        return NON_ATTRACTIVE
    return MARGINAL


def bisect_root(h: Callable[[float], float], lo: float, hi: float,
                tol: float = DEFAULT_TOL) -> float:
    """Bisect a sign change of ``h`` on [lo, hi] down to ``tol``."""
    flo = h(lo)
    if flo == 0.0:
        return lo
    fhi = h(hi)
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise DegenerateInputError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = h(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_fixed_points(f: Callable[[float], float], grid: int = DEFAULT_GRID,
                      tol: float = DEFAULT_TOL, lo: float = 0.0,
                      hi: float = 1.0) -> list[float]:
    """Interior fixed points of a callable on (lo, hi) by sign scan + bisection.

    Roots closer together than the grid pitch can merge; catalog
    constructions are checked to have well-separated roots.
    """
    def h(p: float) -> float:
        return f(p) - p

    step = (hi - lo) / grid
    xs = [lo + i * step for i in range(1, grid)]
    hv = [h(x) for x in xs]
    roots = [x for x, v in zip(xs, hv) if v == 0.0]
    for i in range(len(xs) - 1):
        a, b = hv[i], hv[i + 1]
        if a != 0.0 and b != 0.0 and (a > 0) != (b > 0):
            roots.append(bisect_root(h, xs[i], xs[i + 1], tol))
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 10 * tol:
            merged.append(r)
    return merged


def fixed_points(poly: Polynomial, grid: int = DEFAULT_GRID,
                 tol: float = DEFAULT_TOL) -> FixedPointReport:
    """All fixed points of ``poly`` in [0, 1], classified by derivative.

    Endpoints are checked directly; the interior is covered by a uniform
    sign-change scan of f(p) - p followed by bisection.
    """
    if len(poly.coeffs) == 1:
        raise DegenerateInputError("constant polynomial has no dynamics")
    if poly.coeffs == (0.0, 1.0):
        raise DegenerateInputError("identity polynomial: every point fixed")
    deriv = poly.derivative()
    found: list[float] = []
    if abs(poly(0.0)) <= ENDPOINT_TOL:
        found.append(0.0)
    interior = scan_fixed_points(poly, grid=grid, tol=tol)
    found.extend(r for r in interior if tol < r < 1.0 - tol)
    if abs(poly(1.0) - 1.0) <= ENDPOINT_TOL:
        found.append(1.0)
    pts = tuple(FixedPoint(r, deriv(r), classify(deriv(r)))
                for r in sorted(found))
    return FixedPointReport(pts)


# ---------------------------------------------------------------------------
# Divergence ratio g(p) = (f(p) - p) / (p (1-p) (p-t))
# ---------------------------------------------------------------------------

def _synthetic_divide(coeffs: Sequence[float], root: float
                      ) -> tuple[list[float], float]:
    """Divide by (p - root); returns (quotient low-first, remainder)."""
    n = len(coeffs) - 1
    quot = [0.0] * n
    carry = coeffs[n]
    for i in range(n - 1, -1, -1):
        quot[i] = carry
        carry = coeffs[i] + root * carry
    return quot, carry


def divergence_ratio(poly: Polynomial, t: float,
                     remainder_tol: float = 1e-8) -> Polynomial:
    """The quotient polynomial g with f(p) - p = p (1-p) (p-t) g(p).

    Dividing out the three linear factors exactly (synthetic division)
    makes g evaluable everywhere, including at 0, t and 1.
    """
    h = list(poly.coeffs)
    while len(h) < 2:
        h.append(0.0)
    h[1] -= 1.0
    if abs(h[0]) > remainder_tol:
        raise InconsistentFixedPointError(
            f"f(0) = {h[0]!r}; 0 is not a fixed point")
    q = h[1:]                                   # divided by p
    q, rem_t = _synthetic_divide(q, t)
    if abs(rem_t) > remainder_tol:
        raise InconsistentFixedPointError(
            f"remainder {rem_t!r} dividing by (p - {t}); not a fixed point")
    q, rem_1 = _synthetic_divide(q, 1.0)
    if abs(rem_1) > remainder_tol:
        raise InconsistentFixedPointError(
            f"remainder {rem_1!r} dividing by (p - 1); 1 is not a fixed point")
    # (1-p) = -(p-1), so negate the quotient once.
    return Polynomial(tuple(-c for c in q))
