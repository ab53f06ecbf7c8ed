"""Exact formal Laurent series over Q with fractional exponents.

A series stores coefficients on the exponent lattice (1/D)*Z as a sparse map
k -> coefficient of q^(k/D), together with a truncation order: coefficients
are known (and stored) only for exponents strictly below ``trunc``.  All
arithmetic is exact; no floating point enters this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class QSeries:
    """Sparse exact Laurent series truncated below a rational order."""

    __slots__ = ("denom", "coeffs", "trunc")

    def __init__(self, coeffs=None, denom: int = 1, trunc=None):
        if trunc is None:
            raise ValueError("a truncation order is required")
        self.denom = int(denom)
        self.trunc = Fraction(trunc)
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                v = Fraction(v)
                if v != 0 and Fraction(k, self.denom) < self.trunc:
                    self.coeffs[int(k)] = v
        self._normalize()

    # -- helpers -------------------------------------------------------------
    def _normalize(self):
        if not self.coeffs:
            self.denom = 1
            return
        g = self.denom
        for k in self.coeffs:
            g = math.gcd(g, k)
            if g == 1:
                return
        if g > 1:
            self.coeffs = {k // g: v for k, v in self.coeffs.items()}
            self.denom //= g

    def _rescaled(self, new_denom: int) -> dict:
        f = new_denom // self.denom
        return {k * f: v for k, v in self.coeffs.items()}

    @staticmethod
    def zero(trunc) -> "QSeries":
        return QSeries({}, 1, trunc)

    @staticmethod
    def monomial(coeff, exponent, trunc) -> "QSeries":
        e = Fraction(exponent)
        return QSeries({e.numerator: Fraction(coeff)}, e.denominator, trunc)

    @staticmethod
    def one(trunc) -> "QSeries":
        return QSeries.monomial(1, 0, trunc)

    def coefficient(self, exponent) -> Fraction:
        e = Fraction(exponent)
        if e >= self.trunc:
            raise ValueError(f"coefficient at {e} is beyond truncation {self.trunc}")
        if (e * self.denom).denominator != 1:
            return Fraction(0)
        return self.coeffs.get(int(e * self.denom), Fraction(0))

    def support(self):
        return sorted(Fraction(k, self.denom) for k in self.coeffs)

    def min_exponent(self):
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.denom)

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, trunc) -> "QSeries":
        return QSeries(dict(self.coeffs), self.denom, min(self.trunc, Fraction(trunc)))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.trunc == other.trunc and self.denom == other.denom
                and self.coeffs == other.coeffs)

    def __repr__(self):
        terms = []
        for e in self.support()[:8]:
            terms.append(f"{self.coefficient(e)}*q^{e}")
        body = " + ".join(terms) if terms else "0"
        more = " + ..." if len(self.coeffs) > 8 else ""
        return f"QSeries({body}{more}; O(q^{self.trunc}))"

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.monomial(other, 0, self.trunc)
        if not isinstance(other, QSeries):
            return NotImplemented
        D = self.denom * other.denom // math.gcd(self.denom, other.denom)
        out = self._rescaled(D)
        for k, v in other._rescaled(D).items():
            out[k] = out.get(k, Fraction(0)) + v
        return QSeries(out, D, min(self.trunc, other.trunc))

    __radd__ = __add__

    def __neg__(self):
        return QSeries({k: -v for k, v in self.coeffs.items()}, self.denom, self.trunc)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.monomial(other, 0, self.trunc)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            r = Fraction(other)
            if r == 0:
                return QSeries.zero(self.trunc)
            return QSeries({k: v * r for k, v in self.coeffs.items()},
                           self.denom, self.trunc)
        if not isinstance(other, QSeries):
            return NotImplemented
        D = self.denom * other.denom // math.gcd(self.denom, other.denom)
        a = self._rescaled(D)
        b = other._rescaled(D)
        va = min(a) if a else 0
        vb = min(b) if b else 0
        trunc = min(self.trunc + Fraction(vb, D), other.trunc + Fraction(va, D))
        if self.is_zero() or other.is_zero():
            return QSeries.zero(trunc)
        lim = trunc * D
        out = {}
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                k = k1 + k2
                if k < lim:
                    out[k] = out.get(k, Fraction(0)) + v1 * v2
        return QSeries(out, D, trunc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            return QSeries.one(self.trunc)
        result = QSeries.one(self.trunc)
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def invert(self) -> "QSeries":
        """Multiplicative inverse; requires a nonzero minimal term."""
        v = self.min_exponent()
        if v is None:
            raise ValueError("cannot invert the zero series")
        a0 = self.coefficient(v)
        window = self.trunc - v          # number of known orders above the valuation
        u = self * Fraction(1, a0)       # unit leading coefficient
        shifted = _shift(u, -v).truncate(window)
        g = shifted - 1                  # strictly positive minimal exponent
        inv = QSeries.one(window)
        term = QSeries.one(window)
        gv = g.min_exponent()
        if gv is not None:
            k = 1
            while gv * k < window:
                term = term * (-g)
                if term.is_zero():
                    break
                inv = inv + term
                k += 1
        return _shift(inv, -v) * Fraction(1, a0)


def _shift(f: QSeries, delta) -> QSeries:
    """Multiply by q^delta: map every exponent e to e + delta."""
    delta = Fraction(delta)
    D = f.denom * delta.denominator // math.gcd(f.denom, delta.denominator)
    step = int(delta * D)
    scale = D // f.denom
    return QSeries({k * scale + step: v for k, v in f.coeffs.items()},
                   D, f.trunc + delta)


def log1p_series(g: QSeries) -> QSeries:
    """log(1 + g) = sum_{k>=1} (-1)^(k+1) g^k / k for g with positive valuation."""
    v = g.min_exponent()
    if v is None:
        return QSeries.zero(g.trunc)
    if v <= 0:
        raise ValueError("log1p requires a strictly positive minimal exponent")
    out = QSeries.zero(g.trunc)
    term = QSeries.one(g.trunc)
    k = 1
    while v * k < g.trunc:
        term = term * g
        if term.is_zero():
            break
        out = out + term * Fraction((-1) ** (k + 1), k)
        k += 1
    return out


def substitute_quarter(f: QSeries) -> QSeries:
    """Substitute tau -> tau/4, i.e. map exponents e -> e/4."""
    return QSeries(dict(f.coeffs), f.denom * 4, f.trunc / 4)


@dataclass(frozen=True)
class EtaQuotient:
    """Product of eta(delta*tau)^r factors given as ((delta, r), ...)."""

    factors: tuple

    def __post_init__(self):
        for delta, r in self.factors:
            if delta < 1:
                raise ValueError("delta must be positive")

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(r for _, r in self.factors), 2)


def _eta_power_block(delta: int, order: Fraction) -> QSeries:
    """prod_{n>=1}(1 - q^(delta n)) via the pentagonal number theorem."""
    coeffs = {0: Fraction(1)}
    m = 1
    lim = order  # integer exponents; lattice denom 1
    while True:
        p1 = delta * m * (3 * m - 1) // 2
        p2 = delta * m * (3 * m + 1) // 2
        if p1 >= lim and p2 >= lim:
            break
        if p1 < lim:
            coeffs[p1] = Fraction((-1) ** m)
        if p2 < lim:
            coeffs[p2] = Fraction((-1) ** m)
        m += 1
    return QSeries(coeffs, 1, lim)


def eta_expansion(eq: EtaQuotient, order) -> QSeries:
    """q-expansion of the eta quotient up to (but excluding) exponent order."""
    order = Fraction(order)
    if order <= 0:
        raise ValueError("order must be positive")
    shift = sum(Fraction(delta * r, 24) for delta, r in eq.factors)
    # work on the shifted (integer-exponent) product, then shift by q^shift
    result = QSeries.one(order - shift + 1)
    for delta, r in eq.factors:
        block = _eta_power_block(delta, order - shift + 1)
        result = result * (block ** r)
    return _shift(result, shift).truncate(order)


def theta_series(m: int, order) -> QSeries:
    """sum_{n in Z} q^(m^2 n^2) truncated below the given order."""
    order = Fraction(order)
    if order <= 0:
        raise ValueError("order must be positive")
    coeffs = {0: Fraction(1)}
    n = 1
    while m * m * n * n < order:
        coeffs[m * m * n * n] = Fraction(2)
        n += 1
    return QSeries(coeffs, 1, order)


def sturm_bound(weight_numerator_2k: int, N: int) -> int:
    """ceil((k/12) * [SL2(Z):Gamma_0(N)]) for weight k = weight_numerator_2k/2."""
    if weight_numerator_2k < 2 or weight_numerator_2k % 2 != 0:
        raise ValueError("weight numerator must be a positive even integer")
    index = N
    for p in _prime_divisors(N):
        index = index // p * (p + 1)
    return -((-weight_numerator_2k * index) // 24)


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
