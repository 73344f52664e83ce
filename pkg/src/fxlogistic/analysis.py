"""Lyapunov exponent and rounding-mode divergence of fixed-point orbits.

Everything here runs in double precision on decoded orbit values; the
fixed-point discipline only applies to generating the orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ComparisonError, InsufficientDataError
from .fixq16 import ONE_RAW
from .uoml import Orbit

LN2 = math.log(2.0)
DEFAULT_EPSILON = 0.1


def derivative(x: float, r: float) -> float:
    """Slope of the logistic map, ``r * (1 - 2x)``."""
    return r * (1.0 - 2.0 * x)


@dataclass(frozen=True)
class LyapunovEstimate:
    exponent: float
    n_used: int
    skipped: int = 0
    reference: Optional[float] = LN2
    # mean of |ln|f'||, only filled in debug mode
    abs_log_form: Optional[float] = None

    @property
    def deviation(self) -> Optional[float]:
        if self.reference is None:
            return None
        return self.exponent - self.reference


def lyapunov_series(
    xs: Sequence[float],
    r: float,
    reference: Optional[float] = LN2,
    debug: bool = False,
) -> LyapunovEstimate:
    """Mean of ``ln|f'(x)|`` over ``xs``.

    Points where the slope is exactly zero (x = 0.5) are skipped and counted
    in ``skipped`` instead of sending the mean to -inf.
    """
    total = 0.0
    abs_total = 0.0
    used = 0
    skipped = 0
    for x in xs:
        slope = abs(derivative(x, r))
        if slope == 0.0:
            skipped += 1
            continue
        term = math.log(slope)
        total += term
        abs_total += abs(term)
        used += 1
    if used == 0:
        raise InsufficientDataError(
            f"no usable terms for the Lyapunov sum ({len(xs)} points, {skipped} at x = 0.5)"
        )
    return LyapunovEstimate(
        total / used, used, skipped, reference, abs_total / used if debug else None
    )


def lyapunov(orbit: Orbit, reference: Optional[float] = LN2, debug: bool = False) -> LyapunovEstimate:
    """Lyapunov exponent of an orbit of N iterations, summing over x_0 .. x_{N-1}."""
    if len(orbit.records) < 2:
        raise InsufficientDataError(
            "need at least one iteration beyond x0 to estimate a Lyapunov exponent"
        )
    xs = [float(rec.x) for rec in orbit.records[:-1]]
    return lyapunov_series(xs, float(orbit.params.r), reference, debug)


@dataclass(frozen=True)
class DivergenceProfile:
    # (n, |delta| decoded, delta in raw units as a - b)
    rows: tuple[tuple[int, float, int], ...]

    @property
    def first_bit_divergence(self) -> Optional[int]:
        return next((n for n, _, d in self.rows if d != 0), None)

    def first_visible_divergence(self, epsilon: float = DEFAULT_EPSILON) -> Optional[int]:
        return next((n for n, diff, _ in self.rows if diff > epsilon), None)

    @property
    def max_abs_diff(self) -> float:
        return max((diff for _, diff, _ in self.rows), default=0.0)


def divergence(a: Orbit, b: Orbit) -> DivergenceProfile:
    pa, pb = a.params, b.params
    if (pa.r, pa.x0, pa.n_iter) != (pb.r, pb.x0, pb.n_iter):
        raise ComparisonError("orbits differ in r, x0 or n_iter; only the rounding mode may differ")
    if len(a.records) != len(b.records):
        raise ComparisonError(f"orbit lengths differ: {len(a.records)} vs {len(b.records)}")
    rows = []
    for ra, rb in zip(a.records, b.records):
        d = ra.x.raw - rb.x.raw
        rows.append((ra.n, abs(d) / ONE_RAW, d))
    return DivergenceProfile(tuple(rows))
