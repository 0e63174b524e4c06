"""Private mpmath context shared by the floating-point parts of the package.

A dedicated context keeps the working precision independent of whatever the
caller does with the global ``mpmath.mp``.
"""
from fractions import Fraction

from mpmath.ctx_mp import MPContext

MIN_PREC = 128
DEFAULT_PREC = 128

MP = MPContext()
MP.prec = DEFAULT_PREC


def set_precision(bits: int) -> None:
    if bits < MIN_PREC:
        raise ValueError(f"working precision must be >= {MIN_PREC} bits, got {bits}")
    MP.prec = bits


def get_precision() -> int:
    return MP.prec


def mpf(x):
    """Convert an int, Fraction, float or mpf into the package context."""
    if isinstance(x, Fraction):
        return MP.mpf(x.numerator) / x.denominator
    return MP.mpf(x)


def sqrt_q(x: Fraction):
    return MP.sqrt(mpf(x))
