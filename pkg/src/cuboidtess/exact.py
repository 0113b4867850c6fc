"""Exact arithmetic in the quadratic field Q(sqrt 2).

An :class:`ExactScalar` is ``rat + irr * sqrt(2)`` with both coefficients
stored as :class:`fractions.Fraction` (always in lowest terms), so equality
and hashing are structural.
"""

from __future__ import annotations

import re
from decimal import Decimal, localcontext
from fractions import Fraction

__all__ = ["ExactScalar", "Rational", "SQRT2", "ZERO", "ONE", "as_exact", "parse", "sign"]

Rational = Fraction


class ExactScalar:
    __slots__ = ("rat", "irr")

    def __init__(self, rat=0, irr=0):
        self.rat = Fraction(rat)
        self.irr = Fraction(irr)

    # -- construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, rat: Fraction, irr: Fraction) -> "ExactScalar":
        obj = object.__new__(cls)
        obj.rat = rat
        obj.irr = irr
        return obj

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = as_exact(other)
        return ExactScalar._raw(self.rat + other.rat, self.irr + other.irr)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_exact(other)
        return ExactScalar._raw(self.rat - other.rat, self.irr - other.irr)

    def __rsub__(self, other):
        return as_exact(other) - self

    def __neg__(self):
        return ExactScalar._raw(-self.rat, -self.irr)

    def __mul__(self, other):
        other = as_exact(other)
        a, b, c, d = self.rat, self.irr, other.rat, other.irr
        return ExactScalar._raw(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "ExactScalar":
        return ExactScalar._raw(self.rat, -self.irr)

    def norm(self) -> Fraction:
        """Field norm ``rat**2 - 2 * irr**2``; zero only for zero."""
        return self.rat * self.rat - 2 * self.irr * self.irr

    def __truediv__(self, other):
        other = as_exact(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        num = self * other.conjugate()
        return ExactScalar._raw(num.rat / n, num.irr / n)

    def __rtruediv__(self, other):
        return as_exact(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparisons ----------------------------------------------------------
    def sign(self) -> int:
        return sign(self)

    def __eq__(self, other):
        try:
            other = as_exact(other)
        except TypeError:
            return NotImplemented
        return self.rat == other.rat and self.irr == other.irr

    def __hash__(self):
        if self.irr == 0:
            return hash(self.rat)
        return hash((self.rat, self.irr))

    def __lt__(self, other):
        return sign(self - as_exact(other)) < 0

    def __le__(self, other):
        return sign(self - as_exact(other)) <= 0

    def __gt__(self, other):
        return sign(self - as_exact(other)) > 0

    def __ge__(self, other):
        return sign(self - as_exact(other)) >= 0

    def __bool__(self):
        return bool(self.rat) or bool(self.irr)

    # -- conversions ----------------------------------------------------------
    def is_rational(self) -> bool:
        return self.irr == 0

    def to_decimal(self, digits: int = 30) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            r = Decimal(self.rat.numerator) / Decimal(self.rat.denominator)
            if self.irr:
                i = Decimal(self.irr.numerator) / Decimal(self.irr.denominator)
                r += i * Decimal(2).sqrt()
            ctx.prec = digits
            return +r

    def __float__(self):
        return float(self.to_decimal(20))

    def __str__(self):
        return format_exact(self)

    def __repr__(self):
        return f"ExactScalar({self.rat!s}, {self.irr!s})"


def as_exact(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactScalar._raw(Fraction(x), Fraction(0))
    raise TypeError(f"cannot convert {type(x).__name__} to ExactScalar")


def sign(x: ExactScalar) -> int:
    """Exact sign of ``a + b*sqrt(2)`` without floating point."""
    a, b = x.rat, x.irr
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with 2 b^2
    d = a * a - 2 * b * b
    sd = (d > 0) - (d < 0)
    return sa * sd


ZERO = ExactScalar(0, 0)
ONE = ExactScalar(1, 0)
SQRT2 = ExactScalar(0, 1)


def _frac_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_exact(x: ExactScalar) -> str:
    """Textual form ``p/q`` or ``p/q+r/s*sqrt2`` (``-`` for a negative irrational part)."""
    if x.irr == 0:
        return _frac_text(x.rat)
    op = "+" if x.irr > 0 else "-"
    return f"{_frac_text(x.rat)}{op}{_frac_text(abs(x.irr))}*sqrt2"


_TERM = re.compile(r"([+-]?)([0-9]+(?:/[0-9]+)?)?(\*?sqrt2)?")


def parse(text: str) -> ExactScalar:
    """Parse the textual form written by :func:`format_exact`.

    Also accepts shorthands such as ``1``, ``sqrt2``, ``-1/2*sqrt2`` and
    ``3-sqrt2``.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    rat = Fraction(0)
    irr = Fraction(0)
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"malformed scalar {text!r}")
        if pos > 0 and not m.group(1):
            raise ValueError(f"malformed scalar {text!r}")
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(1) == "-":
            coef = -coef
        if m.group(3):
            if m.group(2) and not m.group(3).startswith("*"):
                raise ValueError(f"malformed scalar {text!r}")
            irr += coef
        else:
            rat += coef
        pos = m.end()
    return ExactScalar._raw(rat, irr)
