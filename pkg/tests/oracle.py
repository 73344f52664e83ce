"""Independent reference computations used as test oracles.

Written against exact rationals (``fractions.Fraction``) and plain integers,
without importing anything from the package.
"""

import math
from fractions import Fraction

SCALE = 65536
LO, HI = -(2**31), 2**31 - 1


def quantize(value: Fraction, ceil: bool) -> int:
    return math.ceil(value) if ceil else math.floor(value)


def convert(product_raw: int, ceil: bool) -> tuple[int, bool, bool]:
    """Q32.32 raw -> (Q16.16 raw, overflow, underflow) via exact rationals."""
    q = quantize(Fraction(product_raw, SCALE), ceil)
    if q > HI:
        return HI, True, False
    if q < LO:
        return LO, True, False
    if q == 0 and product_raw != 0:
        return 0, False, True
    return q, False, False


def step(x: int, r: int, ceil: bool) -> int:
    rx, _, _ = convert(r * x, ceil)
    out, _, _ = convert(rx * (SCALE - x), ceil)
    return out


def orbit(x0: int, r: int, n: int, ceil: bool) -> list[int]:
    xs = [x0]
    for _ in range(n):
        xs.append(step(xs[-1], r, ceil))
    return xs


def encode(text: str, ceil: bool = False) -> int:
    return quantize(Fraction(text) * SCALE, ceil)


def lyapunov(xs: list[int], r: int) -> float:
    """Plain mean of ln|r(1-2x)| over xs[:-1], using exact slopes before the log."""
    terms = []
    for x in xs[:-1]:
        slope = Fraction(r, SCALE) * (1 - 2 * Fraction(x, SCALE))
        if slope != 0:
            terms.append(math.log(abs(slope)))
    return math.fsum(terms) / len(terms)
