"""Exact rational/quadratic-imaginary arithmetic and configurable-precision reals.

Rational numbers are plain ``fractions.Fraction`` (aliased ``Rat``).  Character
values live in Q(i*sqrt(d)) for a handful of radicands; ``QuadIm`` implements
just enough arithmetic for Schur sums and norm computations.  High-precision
real/complex arithmetic is delegated to gmpy2 (mpfr/mpc) with the precision
always passed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

Rat = Fraction

#: radicands allowed for QuadIm values (0 encodes a plain rational)
ALLOWED_RADICANDS = frozenset({0, 3, 6, 15, 31, 39})


def _as_rat(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class QuadIm:
    """A number a + b*i*sqrt(d) with rational a, b and fixed radicand d."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", _as_rat(self.a))
        object.__setattr__(self, "b", _as_rat(self.b))
        if self.d not in ALLOWED_RADICANDS:
            raise ValueError(f"radicand {self.d} not supported")
        if self.b == 0 and self.d != 0:
            object.__setattr__(self, "d", 0)
        if self.d == 0 and self.b != 0:
            raise ValueError("b must vanish when d = 0")

    # -- construction helpers ------------------------------------------------
    @staticmethod
    def from_rat(x) -> "QuadIm":
        return QuadIm(_as_rat(x), Fraction(0), 0)

    def _coerce(self, other):
        if isinstance(other, QuadIm):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadIm.from_rat(other)
        return None

    # -- ring operations -----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.d != o.d and self.d != 0 and o.d != 0:
            raise ValueError("cannot add values with different radicands")
        d = self.d or o.d
        return QuadIm(self.a + o.a, self.b + o.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadIm(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.d != 0 and o.d != 0 and self.d != o.d:
            raise ValueError("cannot multiply values with different radicands")
        d = self.d or o.d
        # (a + b i sqrt d)(a' + b' i sqrt d) = aa' - d bb' + (ab' + a'b) i sqrt d
        return QuadIm(self.a * o.a - d * self.b * o.b,
                      self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            r = _as_rat(other)
            return QuadIm(self.a / r, self.b / r, self.d)
        return NotImplemented

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.d == o.d)

    def __hash__(self):
        return hash((self.a, self.b, self.d if self.b else 0))

    def __repr__(self):
        if self.b == 0:
            return f"QuadIm({self.a})"
        return f"QuadIm({self.a} + {self.b}*i*sqrt({self.d}))"

    # -- derived operations --------------------------------------------------
    def conj(self) -> "QuadIm":
        return QuadIm(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """a^2 + d*b^2 = x * conj(x)."""
        return self.a * self.a + self.d * self.b * self.b

    def is_rational(self) -> bool:
        return self.b == 0

    def as_rat(self) -> Fraction:
        if self.b != 0:
            raise ValueError("value is not rational")
        return self.a


def quadim_conj(x: QuadIm) -> QuadIm:
    return x.conj()


def quadim_norm(x: QuadIm) -> Fraction:
    return x.norm()


# ---------------------------------------------------------------------------
# Configurable-precision numerics (gmpy2 backed)
# ---------------------------------------------------------------------------

def real_context(precision: int):
    """A gmpy2 context with the given mantissa precision in bits."""
    return gmpy2.context(precision=precision)


def big_real(x, precision: int):
    with gmpy2.local_context(precision=precision):
        return gmpy2.mpfr(x)


def big_complex(re, im, precision: int):
    with gmpy2.local_context(precision=precision):
        return gmpy2.mpc(gmpy2.mpfr(re), gmpy2.mpfr(im))


def rat_to_real(x: Fraction, precision: int):
    with gmpy2.local_context(precision=precision):
        return gmpy2.mpfr(x.numerator) / gmpy2.mpfr(x.denominator)


def to_complex(x: QuadIm, precision: int = 128):
    """Numerical value a + b*sqrt(d)*1j at the requested precision (>= 53 bits)."""
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    with gmpy2.local_context(precision=precision):
        re = rat_to_real(x.a, precision)
        im = rat_to_real(x.b, precision) * gmpy2.sqrt(gmpy2.mpfr(x.d))
        return gmpy2.mpc(re, im)
