"""Logistic map operative unit.

One iteration is computed as ``(r*x) * (1-x)`` with two multiply-convert
units: ``r*x`` is rounded back to Q16.16 before the final product, so an
iteration rounds twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import DomainError
from .fixq16 import (
    ONE_RAW,
    DecimalLike,
    Fix32,
    Flagged,
    RoundMode,
    encode,
    mul_convert,
    one_minus,
)

R_MAX_RAW = 4 * ONE_RAW


@dataclass(frozen=True)
class MapParams:
    r: Fix32
    x0: Fix32
    mode: RoundMode = RoundMode.TRUNC
    n_iter: int = 150

    def __post_init__(self) -> None:
        if self.n_iter < 0:
            raise DomainError(f"n_iter must be nonnegative, got {self.n_iter}")
        check_domain(self.x0, self.r)

    @classmethod
    def from_decimal(
        cls,
        r: DecimalLike = "4",
        x0: DecimalLike = "0.1",
        mode: RoundMode = RoundMode.TRUNC,
        n_iter: int = 150,
        encode_mode: RoundMode = RoundMode.TRUNC,
    ) -> "MapParams":
        """Build params from decimal text; ``encode_mode`` quantizes r and x0."""
        return cls(encode(r, encode_mode), encode(x0, encode_mode), mode, n_iter)

    def with_mode(self, mode: RoundMode) -> "MapParams":
        return replace(self, mode=mode)


@dataclass(frozen=True, slots=True)
class StepResult:
    value: Fix32
    overflow: bool
    underflow: bool
    stages: tuple[Flagged, Flagged]


@dataclass(frozen=True, slots=True)
class IterationRecord:
    n: int
    x: Fix32
    overflow: bool = False
    underflow: bool = False
    # per-stage converter outputs (r*x, then (r*x)*(1-x)); None for n = 0
    stages: Optional[tuple[Flagged, Flagged]] = field(default=None, compare=False)


@dataclass(frozen=True)
class Orbit:
    params: MapParams
    records: tuple[IterationRecord, ...]

    @property
    def values(self) -> list[Fix32]:
        return [rec.x for rec in self.records]

    @property
    def raws(self) -> list[int]:
        return [rec.x.raw for rec in self.records]

    def __len__(self) -> int:
        return len(self.records)


def check_domain(x: Fix32, r: Fix32) -> None:
    if not 0 <= x.raw <= ONE_RAW:
        raise DomainError(f"x = {x.decimal} is outside [0, 1]")
    if not 0 < r.raw <= R_MAX_RAW:
        raise DomainError(f"r = {r.decimal} is outside (0, 4]")


def iterate_once(x: Fix32, r: Fix32, mode: RoundMode) -> StepResult:
    check_domain(x, r)
    rx = mul_convert(r, x, mode)
    out = mul_convert(rx.value, one_minus(x), mode)
    return StepResult(
        out.value,
        rx.overflow or out.overflow,
        rx.underflow or out.underflow,
        (rx, out),
    )


def run_orbit(params: MapParams) -> Orbit:
    records = [IterationRecord(0, params.x0)]
    x = params.x0
    for n in range(1, params.n_iter + 1):
        step = iterate_once(x, params.r, params.mode)
        x = step.value
        records.append(IterationRecord(n, x, step.overflow, step.underflow, step.stages))
    return Orbit(params, tuple(records))
