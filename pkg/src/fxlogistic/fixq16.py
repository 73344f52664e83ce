"""Q16.16 fixed-point words and the multiply-convert unit.

A :class:`Fix32` is a signed 32-bit two's-complement word whose value is
``raw / 2**16``.  Products are formed exactly in a 64-bit Q32.32 word
(:class:`Wide64`) and narrowed back to 32 bits by :func:`convert`, which
rounds (truncate or toward +inf), saturates on overflow and collapses to
zero on underflow, raising the corresponding flag.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation, localcontext
from fractions import Fraction
from typing import Union

from .errors import FixRangeError, ParseError

FRAC_BITS = 16
ONE_RAW = 1 << FRAC_BITS
FRAC_MASK = ONE_RAW - 1

INT32_MIN = -(1 << 31)
INT32_MAX = (1 << 31) - 1
INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1

DecimalLike = Union[str, int, Fraction, Decimal, float]


class RoundMode(enum.IntEnum):
    """Rounding applied when dropping fractional bits.

    The integer value is the level of the ``i_round`` input.
    """

    TRUNC = 0
    CEIL = 1

    @classmethod
    def parse(cls, text: str) -> "RoundMode":
        key = text.strip().lower()
        aliases = {"trunc": cls.TRUNC, "0": cls.TRUNC, "ceil": cls.CEIL, "1": cls.CEIL}
        try:
            return aliases[key]
        except KeyError:
            raise ParseError(f"unknown rounding mode {text!r} (expected trunc|ceil)") from None

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True, slots=True)
class Fix32:
    raw: int

    def __post_init__(self) -> None:
        if not INT32_MIN <= self.raw <= INT32_MAX:
            raise FixRangeError(f"raw value {self.raw} does not fit in 32 bits")

    @property
    def hex(self) -> str:
        """8-digit uppercase hex of the two's-complement word, e.g. ``0x00001999``."""
        return f"0x{self.raw & 0xFFFFFFFF:08X}"

    @property
    def decimal(self) -> str:
        return format_decimal(decode(self))

    def __float__(self) -> float:
        return self.raw / ONE_RAW

    def __repr__(self) -> str:
        return f"Fix32({self.hex}={self.decimal})"


@dataclass(frozen=True, slots=True)
class Wide64:
    """Q32.32 product word; value is ``raw / 2**32``."""

    raw: int

    def __post_init__(self) -> None:
        if not INT64_MIN <= self.raw <= INT64_MAX:
            raise FixRangeError(f"raw value {self.raw} does not fit in 64 bits")

    @property
    def hex(self) -> str:
        return f"0x{self.raw & 0xFFFFFFFFFFFFFFFF:016X}"


@dataclass(frozen=True, slots=True)
class Flagged:
    """Converter output with its ``o_over`` / ``o_under`` indicator bits."""

    value: Fix32
    overflow: bool = False
    underflow: bool = False

    def __post_init__(self) -> None:
        if self.overflow and self.underflow:
            raise AssertionError("overflow and underflow set together")


def to_fraction(d: DecimalLike) -> Fraction:
    if isinstance(d, bool):
        raise ParseError("booleans are not numbers here")
    try:
        return Fraction(d.strip() if isinstance(d, str) else d)
    except (ValueError, ZeroDivisionError, TypeError, InvalidOperation) as exc:
        raise ParseError(f"cannot parse {d!r} as an exact decimal") from exc


def encode(d: DecimalLike, mode: RoundMode = RoundMode.TRUNC) -> Fix32:
    """Quantize ``d`` to Q16.16.

    Strings are parsed exactly, so ``encode("0.1")`` is ``floor(0.1 * 2**16)``
    = 6553, not the quantization of the nearest binary double.
    """
    scaled = to_fraction(d) * ONE_RAW
    q = scaled.numerator // scaled.denominator  # floor
    if mode is RoundMode.CEIL and scaled.denominator != 1:
        q += 1
    if not INT32_MIN <= q <= INT32_MAX:
        raise FixRangeError(f"{d} is outside the Q16.16 range [-32768, 32768)")
    return Fix32(q)


def decode(x: Fix32) -> Decimal:
    """Exact value of ``x``; binary fractions always terminate in decimal."""
    with localcontext() as ctx:
        ctx.prec = 40
        return Decimal(x.raw) / ONE_RAW


def format_decimal(d: Decimal) -> str:
    """Plain (non-scientific) exact rendering with at least one fractional digit."""
    text = format(d, "f")
    if "." in text:
        text = text.rstrip("0")
        if text.endswith("."):
            text += "0"
    else:
        text += ".0"
    if text == "-0.0":
        text = "0.0"
    return text


def one_minus(x: Fix32) -> Fix32:
    """``1 - x`` as an exact raw subtraction; no rounding and no flags."""
    return Fix32(ONE_RAW - x.raw)


def mul_wide(a: Fix32, b: Fix32) -> Wide64:
    return Wide64(a.raw * b.raw)


def _split16(raw: int) -> tuple[int, int]:
    # high half keeps the sign, low half is an unsigned 16-bit field
    return raw >> 16, raw & 0xFFFF


def _wrap64(value: int) -> int:
    return ((value - INT64_MIN) & 0xFFFFFFFFFFFFFFFF) + INT64_MIN


def mul_wide_decomposed(a: Fix32, b: Fix32) -> Wide64:
    """32x32 -> 64 multiply built from four 16x16 partial products.

    With ``a = aH*2**16 + aL`` (aH signed, aL unsigned) the product is
    ``aH*bH*2**32 + (aH*bL + aL*bH)*2**16 + aL*bL``, summed in a 64-bit
    accumulator.
    """
    ah, al = _split16(a.raw)
    bh, bl = _split16(b.raw)
    high = ah * bh
    cross = ah * bl + al * bh
    low = al * bl
    return Wide64(_wrap64((high << 32) + (cross << 16) + low))


def convert(w: Wide64, mode: RoundMode) -> Flagged:
    """Narrow a Q32.32 word to Q16.16.

    TRUNC drops the low 16 bits (floor); CEIL adds one ulp when any dropped
    bit is set. Results beyond the 32-bit range saturate with ``overflow``;
    a nonzero input that rounds to zero sets ``underflow``.
    """
    q = w.raw >> FRAC_BITS
    if mode is RoundMode.CEIL and w.raw & FRAC_MASK:
        q += 1
    if q > INT32_MAX:
        return Flagged(Fix32(INT32_MAX), overflow=True)
    if q < INT32_MIN:
        return Flagged(Fix32(INT32_MIN), overflow=True)
    if q == 0 and w.raw != 0:
        return Flagged(Fix32(0), underflow=True)
    return Flagged(Fix32(q))


def mul_convert(a: Fix32, b: Fix32, mode: RoundMode) -> Flagged:
    """One multiply-convert unit: decomposed multiply then 64->32 conversion."""
    return convert(mul_wide_decomposed(a, b), mode)
