"""Infinite-width level analysis: iteration profiles and convergence order.

The infinite-width firing fraction at level k is the k-fold pointwise
iterate of the mixture activation, so profiles are cheap to compute and
exact to float precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

from .catalog import TreeDistribution
from .errors import DegenerateInputError, RangeError

LINEAR = "LINEAR"
QUADRATIC = "QUADRATIC"
UNDETERMINED = "UNDETERMINED"

#: Errors outside (ERROR_FLOOR, window) are excluded from order fits.
ERROR_FLOOR = 1e-12

#: Iteration stops once the error is this small.
STOP_ERROR = 1e-15

DEFAULT_CORRIDOR = (0.2, 0.8)


@dataclass(frozen=True)
class ConvergenceProfile:
    """Per-level iterates and distances to the limit for one starting point."""

    p: float
    threshold: float
    limit: float
    iterates: tuple[float, ...]
    errors: tuple[float, ...]
    order: str

    def levels_to(self, target_error: float) -> int | None:
        """First level whose error is <= target_error, if reached."""
        for level, e in enumerate(self.errors):
            if e <= target_error:
                return level
        return None

    def write_csv(self, out: TextIO) -> None:
        out.write("level,iterate,error\n")
        for level, (x, e) in enumerate(zip(self.iterates, self.errors)):
            out.write(f"{level},{x!r},{e!r}\n")


def order_estimate(errors: Sequence[float], lower: float = ERROR_FLOOR,
                   upper: float = 0.2) -> str:
    """Classify a decaying error sequence as LINEAR or QUADRATIC.

    Fits the slope of log e_{l+1} against log e_l over consecutive pairs in
    the window (lower, upper).  A slope near 1 is geometric decay; slopes
    of 2 and above mean the error is squared (or better) each level, which
    is what buys the log-k level count, so anything from 1.7 up classifies
    as QUADRATIC.  Fewer than 4 usable points: UNDETERMINED.
    """
    usable = [lower < e < upper for e in errors]
    if sum(usable) < 4:
        return UNDETERMINED
    xs: list[float] = []
    ys: list[float] = []
    for i in range(len(errors) - 1):
        if usable[i] and usable[i + 1]:
            xs.append(math.log(errors[i]))
            ys.append(math.log(errors[i + 1]))
    if len(xs) < 3:
        return UNDETERMINED
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        return UNDETERMINED
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    if 0.8 <= slope <= 1.2:
        return LINEAR
    if slope >= 1.7:
        return QUADRATIC
    return UNDETERMINED


def certified_corridor(f: Callable[[float], float], t: float,
                       grid: int = 512, factor: float = 0.95
                       ) -> tuple[float, float] | None:
    """Measure (u, v) satisfying the quadratic-convergence conditions.

    Finds the largest u with (sup_{(0,u]} f(p)/p^2) * u < factor, and
    symmetrically the smallest v for the 1-side.  Returns None when no
    corridor certifies (constructions with a linear term).
    """
    # f/p^2 is unbounded near 0 unless f'(0) = 0, which a finite grid
    # cannot see; gate on the endpoint derivatives first.
    if f(1e-9) / 1e-9 > 1e-6 or (1.0 - f(1.0 - 1e-9)) / 1e-9 > 1e-6:
        return None
    lo_ps = [t * i / grid for i in range(1, grid)]
    ratios = [f(p) / (p * p) for p in lo_ps]
    best_u = None
    running = 0.0
    for p, r in zip(lo_ps, ratios):
        running = max(running, r)
        if running * p < factor:
            best_u = p
    hi_ps = [t + (1.0 - t) * i / grid for i in range(1, grid)]
    best_v = None
    running = 0.0
    for p, r in zip(reversed(hi_ps),
                    reversed([(1.0 - f(p)) / ((1.0 - p) ** 2)
                              for p in hi_ps])):
        running = max(running, r)
        if running * (1.0 - p) < factor:
            best_v = p
    if best_u is None or best_v is None:
        return None
    return best_u, best_v


def _threshold_of(dist: TreeDistribution) -> float:
    if dist.threshold is not None:
        return dist.threshold
    roots = dist.interior_fixed_points()
    if len(roots) != 1:
        raise DegenerateInputError(
            f"{dist.label} has {len(roots)} interior fixed points; profile "
            f"needs a unique threshold")
    return roots[0]


def profile(dist: TreeDistribution, p: float,
            max_levels: int = 400) -> ConvergenceProfile:
    """Iterate the mixture from ``p`` and record distances to the limit.

    Stops early once the error drops below 1e-15.  The order fit uses the
    corridor attached to the distribution, a measured certificate, or the
    symmetric 0.2/0.8 default, in that order.
    """
    t = _threshold_of(dist)
    if abs(p - t) <= 1e-12:
        raise DegenerateInputError(
            f"p={p} sits on the interior fixed point {t}; iterates stay put")
    if not 0.0 <= p <= 1.0:
        raise RangeError(f"p must be in [0,1], got {p}")
    limit = 0.0 if p < t else 1.0
    iterates = [p]
    errors = [abs(p - limit)]
    x = p
    for _ in range(max_levels):
        if errors[-1] < STOP_ERROR:
            break
        x = dist.evaluate(x)
        iterates.append(x)
        errors.append(abs(x - limit))
    corridor = dist.corridor or certified_corridor(dist.evaluate, t) \
        or DEFAULT_CORRIDOR
    window = corridor[0] if limit == 0.0 else 1.0 - corridor[1]
    order = order_estimate(errors, upper=window)
    return ConvergenceProfile(p=p, threshold=t, limit=limit,
                              iterates=tuple(iterates), errors=tuple(errors),
                              order=order)


# ---------------------------------------------------------------------------
# Sufficient-condition certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionFailure:
    condition: str
    interval: tuple[float, float]
    witness: float
    value: float


@dataclass(frozen=True)
class ConditionReport:
    """Measured constants for the linear-divergence / quadratic-convergence
    conditions, with any violations named by interval and witness point."""

    t: float
    u: float
    v: float
    c1: float
    c2: float
    c3: float
    c4: float
    failures: tuple[ConditionFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_conditions(dist: TreeDistribution, t: float, u: float, v: float,
                      margin: float = 1e-3, grid: int = 2000
                      ) -> ConditionReport:
    """Numerically certify the convergence conditions on grids.

    Requires c1, c2 > 1 on the divergence intervals [u, t-margin] and
    [t+margin, v], c3 with c3*u < 1 on (0, u), and c4 with c4*(1-v) < 1 on
    (v, 1).  Returns the measured constants; failures carry the interval
    and a witness point.
    """
    if not 0.0 < u < t < v < 1.0:
        raise RangeError(f"need 0 < u < t < v < 1, got u={u}, t={t}, v={v}")
    if t - margin <= u or v <= t + margin:
        raise RangeError("margin swallows the divergence intervals")
    f = dist.evaluate
    failures: list[ConditionFailure] = []

    def sweep(lo: float, hi: float, fn: Callable[[float], float],
              minimize: bool) -> tuple[float, float]:
        best_val = math.inf if minimize else -math.inf
        best_p = lo
        for i in range(grid + 1):
            p = lo + (hi - lo) * i / grid
            val = fn(p)
            if (val < best_val) if minimize else (val > best_val):
                best_val, best_p = val, p
        return best_val, best_p

    c1, w1 = sweep(u, t - margin, lambda p: (t - f(p)) / (t - p), True)
    if c1 <= 1.0:
        failures.append(ConditionFailure("linear divergence below t",
                                         (u, t - margin), w1, c1))
    c2, w2 = sweep(t + margin, v, lambda p: (f(p) - t) / (p - t), True)
    if c2 <= 1.0:
        failures.append(ConditionFailure("linear divergence above t",
                                         (t + margin, v), w2, c2))
    step = u / grid
    c3, w3 = sweep(step, u - step, lambda p: f(p) / (p * p), False)
    if c3 * u >= 1.0:
        failures.append(ConditionFailure("quadratic convergence to 0",
                                         (0.0, u), w3, c3))
    step = (1.0 - v) / grid
    c4, w4 = sweep(v + step, 1.0 - step,
                   lambda p: (1.0 - f(p)) / ((1.0 - p) ** 2), False)
    if c4 * (1.0 - v) >= 1.0:
        failures.append(ConditionFailure("quadratic convergence to 1",
                                         (v, 1.0), w4, c4))
    return ConditionReport(t=t, u=u, v=v, c1=c1, c2=c2, c3=c3, c4=c4,
                           failures=tuple(failures))
