"""Signed fixed-point decimal numbers with 18 fractional digits.

Every kernel computation in the package runs on :class:`Fixed`. Values are
stored as a Python ``int`` scaled by ``10**18`` and confined to the signed
128-bit range, so the arithmetic matches what an on-chain implementation
(or the compiled kernel in :mod:`pidrate._kernel`) would produce bit for bit.

Rounding for ``mul`` and ``div`` is to nearest, ties away from zero.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from pidrate.errors import FixedOverflowError, FixedParseError

DECIMALS = 18
SCALE = 10**DECIMALS
RAW_MAX = 2**127 - 1
RAW_MIN = -(2**127)

_DECIMAL_RE = re.compile(r"^([+-]?)(\d+)(?:\.(\d{1,18}))?$")

Number = Union["Fixed", int]


def check_raw(raw: int) -> int:
    """Return ``raw`` unchanged, raising if it is outside the 128-bit range."""
    if raw > RAW_MAX or raw < RAW_MIN:
        raise FixedOverflowError(f"fixed-point overflow: raw value {raw} outside int128")
    return raw


def div_round(num: int, den: int) -> int:
    """Integer ``num / den`` rounded to nearest, ties away from zero."""
    if den == 0:
        raise ZeroDivisionError("fixed-point division by zero")
    q, r = divmod(abs(num), abs(den))
    if 2 * r >= abs(den):
        q += 1
    return -q if (num < 0) != (den < 0) else q


def mul_raw(a: int, b: int) -> int:
    return check_raw(div_round(a * b, SCALE))


def div_raw(a: int, b: int) -> int:
    return check_raw(div_round(a * SCALE, b))


class Fixed:
    """A signed decimal with 18 fractional digits.

    ``Fixed(raw)`` wraps an already-scaled integer; use
    :meth:`from_decimal_string` or :func:`fx` to build values from text.
    Arithmetic with plain ``int`` operands treats them as whole numbers.
    Floats are deliberately not accepted anywhere.
    """

    __slots__ = ("raw",)

    def __init__(self, raw: int = 0):
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise TypeError(f"Fixed expects an integer raw value, got {type(raw).__name__}")
        self.raw = check_raw(raw)

    # construction / rendering

    @classmethod
    def from_decimal_string(cls, s: str) -> Fixed:
        m = _DECIMAL_RE.match(s.strip()) if isinstance(s, str) else None
        if m is None:
            raise FixedParseError(f"not a decimal with at most {DECIMALS} fractional digits: {s!r}")
        sign, whole, frac = m.groups()
        raw = int(whole) * SCALE + int((frac or "").ljust(DECIMALS, "0") or "0")
        return cls(-raw if sign == "-" else raw)

    @classmethod
    def from_int(cls, n: int) -> Fixed:
        return cls(n * SCALE)

    @classmethod
    def from_fraction(cls, q: Fraction) -> Fixed:
        """Nearest representable value to an exact rational."""
        return cls(div_round(q.numerator * SCALE, q.denominator))

    def to_decimal_string(self, pad: bool = False) -> str:
        """Render as decimal text.

        The default form drops trailing fractional zeros (and the point for
        whole numbers) so that parsing and rendering round-trip. ``pad=True``
        always emits all 18 fractional digits, which is what the CSV writer
        uses.
        """
        whole, frac = divmod(abs(self.raw), SCALE)
        sign = "-" if self.raw < 0 else ""
        digits = f"{frac:018d}"
        if not pad:
            digits = digits.rstrip("0")
            if not digits:
                return f"{sign}{whole}"
        return f"{sign}{whole}.{digits}"

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, SCALE)

    def __float__(self) -> float:
        return self.raw / SCALE

    def __str__(self) -> str:
        return self.to_decimal_string()

    def __repr__(self) -> str:
        return f"Fixed('{self.to_decimal_string()}')"

    def __hash__(self) -> int:
        return hash(("Fixed", self.raw))

    def __reduce__(self):
        return (Fixed, (self.raw,))

    # arithmetic

    def __add__(self, other: Number) -> Fixed:
        o = _as_raw(other)
        return NotImplemented if o is None else Fixed(self.raw + o)

    __radd__ = __add__

    def __sub__(self, other: Number) -> Fixed:
        o = _as_raw(other)
        return NotImplemented if o is None else Fixed(self.raw - o)

    def __rsub__(self, other: Number) -> Fixed:
        o = _as_raw(other)
        return NotImplemented if o is None else Fixed(o - self.raw)

    def __mul__(self, other: Number) -> Fixed:
        if isinstance(other, Fixed):
            return Fixed(mul_raw(self.raw, other.raw))
        if isinstance(other, int) and not isinstance(other, bool):
            return Fixed(self.raw * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> Fixed:
        o = _as_raw(other)
        return NotImplemented if o is None else Fixed(div_raw(self.raw, o))

    def __rtruediv__(self, other: Number) -> Fixed:
        o = _as_raw(other)
        return NotImplemented if o is None else Fixed(div_raw(o, self.raw))

    def __neg__(self) -> Fixed:
        return Fixed(-self.raw)

    def __pos__(self) -> Fixed:
        return self

    def __abs__(self) -> Fixed:
        return Fixed(abs(self.raw))

    # comparison

    def __eq__(self, other: object) -> bool:
        o = _as_raw(other)
        return NotImplemented if o is None else self.raw == o

    def __lt__(self, other: Number) -> bool:
        o = _as_raw(other)
        return NotImplemented if o is None else self.raw < o

    def __le__(self, other: Number) -> bool:
        o = _as_raw(other)
        return NotImplemented if o is None else self.raw <= o

    def __gt__(self, other: Number) -> bool:
        o = _as_raw(other)
        return NotImplemented if o is None else self.raw > o

    def __ge__(self, other: Number) -> bool:
        o = _as_raw(other)
        return NotImplemented if o is None else self.raw >= o

    def __bool__(self) -> bool:
        return self.raw != 0


def _as_raw(value) -> int | None:
    if isinstance(value, Fixed):
        return value.raw
    if isinstance(value, int) and not isinstance(value, bool):
        return value * SCALE
    return None


def fx(value: Union[Fixed, int, str]) -> Fixed:
    """Coerce decimal text, an int or a Fixed into a Fixed."""
    if isinstance(value, Fixed):
        return value
    if isinstance(value, str):
        return Fixed.from_decimal_string(value)
    if isinstance(value, int) and not isinstance(value, bool):
        return Fixed.from_int(value)
    raise TypeError(f"cannot build a Fixed from {type(value).__name__}; pass decimal text")


# function forms, handy where operator overloading reads poorly

def from_decimal_string(s: str) -> Fixed:
    return Fixed.from_decimal_string(s)


def to_decimal_string(x: Fixed, pad: bool = False) -> str:
    return x.to_decimal_string(pad=pad)


def mul(a: Fixed, b: Fixed) -> Fixed:
    return Fixed(mul_raw(a.raw, b.raw))


def div(a: Fixed, b: Fixed) -> Fixed:
    return Fixed(div_raw(a.raw, b.raw))


def mul_div(a: Fixed, b: Fixed, c: Fixed) -> Fixed:
    """``a * b / c`` with a full-width intermediate and a single rounding.

    Only the result has to fit in range, so it stays usable where ``a * b``
    alone would overflow.
    """
    return Fixed(check_raw(div_round(a.raw * b.raw, c.raw)))


def fmin(a: Fixed, b: Fixed) -> Fixed:
    return a if a.raw <= b.raw else b


def fmax(a: Fixed, b: Fixed) -> Fixed:
    return a if a.raw >= b.raw else b


ZERO = Fixed(0)
ONE = Fixed(SCALE)
