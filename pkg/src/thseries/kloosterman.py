"""Kronecker symbols, the eps_d factor, the multiplier psi_{N,v,h}, and
half-integral-weight Kloosterman sums with their Salie/2-power factorization.

The Kloosterman sum here is

    K_psi(m, n, c) = sum*_{d mod c} psi(c,d) (c/d) eps_d e((m dbar + n d)/c)

with eps_d = 1 for d = 1 mod 4 and i for d = 3 mod 4, the sum running over
primitive residues d mod c, and 4 | c.  The multiplier phase is
psi(c, d) = exp(+2*pi*i*v*c*d/(N*h)); with this sign the assembled Rademacher
coefficients reproduce the known integer series (see the repository notes for
the calibration).

For trivial multiplier and c = 2^l * c' (l >= 2, c' odd) the sum factors as

    K(m, n, c) = K2(m*cbar', n*cbar', 2^l; t) * S(m*tbar, n*tbar, c'),

where tbar inverts 2^l mod c', t = 1 iff c' = 3 mod 4, K2 is the 2-power part
twisted by (-1/d)^t, and S is a Salie sum with character (d/c').  The Salie
factor splits over prime powers and admits a closed form via square roots of
m*n, which is what makes large truncation sums affordable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from sympy.ntheory.residue_ntheory import sqrt_mod


def kronecker(c: int, d: int) -> int:
    """Extended Kronecker symbol (c/d)."""
    return int(gmpy2.kronecker(c, d))


def epsilon(d: int) -> complex:
    """1 if d = 1 mod 4, i if d = 3 mod 4; rejects even d."""
    if d % 2 == 0:
        raise ValueError("epsilon is defined for odd d only")
    return 1 if d % 4 == 1 else 1j


@dataclass(frozen=True)
class MultiplierParams:
    """Parameters (N, v, h) of the multiplier system on Gamma_0(4N)."""

    N: int
    v: int
    h: int

    def __post_init__(self):
        if self.N < 1 or self.h < 1:
            raise ValueError("N and h must be positive")
        if math.gcd(4 * self.N, 96) % self.h != 0:
            raise ValueError(f"h={self.h} does not divide gcd(4N,96) for N={self.N}")

    @property
    def h_hat(self) -> int:
        return self.h // math.gcd(self.h, 4)

    @property
    def v_hat(self) -> int:
        return 4 * self.v // math.gcd(self.h, 4)

    def is_trivial(self) -> bool:
        return self.v % self.h == 0


def _exp2pi(frac: Fraction, precision: int):
    """exp(2*pi*i*frac) at the given precision, frac an exact rational."""
    with gmpy2.local_context(precision=precision):
        ang = 2 * gmpy2.const_pi() * gmpy2.mpfr(frac.numerator) / gmpy2.mpfr(frac.denominator)
        return gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))


def psi_value(params: MultiplierParams, c: int, d: int, precision: int = 128):
    """Multiplier phase exp(2*pi*i*v*c*d/(N*h)) for lower row (c, d)."""
    frac = Fraction(params.v * c * d, params.N * params.h)
    return _exp2pi(frac - int(frac), precision)


def vanishing_predicate(m: int, n: int, c: int) -> bool:
    """True iff 8 | c and m != n mod 4 (the vanishing-lemma hypothesis).

    Note that the corresponding sums genuinely vanish only when 16 | c, or when
    8 | c and m = n mod 2; for c = 8 mod 16 with m + n odd there are
    counterexamples such as K(0, 1, 8) = 2*sqrt(2)*(1+i).
    """
    return c % 8 == 0 and (m - n) % 4 != 0


def kloosterman_sum(m: int, n: int, c: int, params: MultiplierParams | None = None,
                    precision: int = 128):
    """Direct evaluation of K_psi(m, n, c) over primitive residues d mod c."""
    if c % 4 != 0:
        raise ValueError("modulus must be divisible by 4")
    if params is not None and c % (4 * params.N) != 0:
        raise ValueError("modulus must be a multiple of 4N when params are given")
    with gmpy2.local_context(precision=precision):
        total = gmpy2.mpc(0)
        for d in range(1, c, 2):
            if math.gcd(d, c) != 1:
                continue
            dbar = pow(d, -1, c)
            frac = Fraction(m * dbar + n * d, c)
            if params is not None:
                frac += Fraction(params.v * c * d, params.N * params.h)
            frac -= int(frac)
            term = _exp2pi(frac, precision)
            k = kronecker(c, d)
            if k == 0:
                continue
            if d % 4 == 3:
                term = gmpy2.mpc(-term.imag, term.real)  # multiply by i
            total += term if k == 1 else -term
        return total


# ---------------------------------------------------------------------------
# Factored evaluation: 2-power part x Salie part
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1 << 18)
def _factorint_cached(n: int) -> tuple:
    from sympy import factorint
    return tuple(sorted(factorint(n).items()))


@lru_cache(maxsize=1 << 18)
def _sqrt_roots(a: int, pe: int) -> tuple:
    """All x mod pe with x^2 = a (mod pe)."""
    r = sqrt_mod(a % pe, pe, all_roots=True)
    return tuple(r) if r else ()


@lru_cache(maxsize=1 << 18)
def _k2_twisted(a: int, b: int, l: int, t: int, precision: int):
    """sum over odd d mod 2^l of (2/d)^l eps_d (-1/d)^t e((a dbar + b d)/2^l)."""
    c = 1 << l
    with gmpy2.local_context(precision=precision):
        total = gmpy2.mpc(0)
        for d in range(1, c, 2):
            dbar = pow(d, -1, c)
            term = _exp2pi(Fraction((a * dbar + b * d) % c, c), precision)
            sign = 1
            if l % 2 == 1 and d % 8 in (3, 5):
                sign = -sign
            if t and d % 4 == 3:
                sign = -sign
            if d % 4 == 3:
                term = gmpy2.mpc(-term.imag, term.real)
            total += term if sign == 1 else -term
        return total


@lru_cache(maxsize=1 << 20)
def _k2_twisted_f64(a: int, b: int, l: int, t: int) -> complex:
    c = 1 << l
    total = 0j
    tau = 2 * math.pi / c
    for d in range(1, c, 2):
        dbar = pow(d, -1, c)
        term = cmath.exp(1j * (tau * ((a * dbar + b * d) % c)))
        sign = 1
        if l % 2 == 1 and d % 8 in (3, 5):
            sign = -sign
        if t and d % 4 == 3:
            sign = -sign
        if d % 4 == 3:
            term *= 1j
        total += sign * term
    return total


@lru_cache(maxsize=1 << 18)
def _salie_direct_pp(a: int, b: int, pe: int, p: int, precision: int | None):
    """Direct Salie sum with character (d/pe) over d mod pe (odd prime power)."""
    if precision is None:
        total = 0j
        tau = 2 * math.pi / pe
        for d in range(1, pe):
            if d % p == 0:
                continue
            k = kronecker(d, pe)
            dbar = pow(d, -1, pe)
            total += k * cmath.exp(1j * (tau * ((a * dbar + b * d) % pe)))
        return total
    with gmpy2.local_context(precision=precision):
        total = gmpy2.mpc(0)
        for d in range(1, pe):
            if d % p == 0:
                continue
            k = kronecker(d, pe)
            if k == 0:
                continue
            dbar = pow(d, -1, pe)
            term = _exp2pi(Fraction((a * dbar + b * d) % pe, pe), precision)
            total += term if k == 1 else -term
        return total


def _salie_gauss_pp(a: int, e: int, pe: int, p: int, precision: int | None):
    """Closed form for sum*_{d mod p^e} (d/p^e) e(a*d/p^e).

    For odd e the character is the lifted Legendre symbol: the sum vanishes
    unless p^(e-1) || a, where it equals p^(e-1) (a'/p) g_p with g_p the
    quadratic Gauss sum.  For even e the character is trivial on units and
    the sum is the Ramanujan sum c_{p^e}(a).
    """
    a %= pe
    alpha = e if a == 0 else min(e, _p_valuation(a, p))
    if e % 2 == 0:
        if alpha >= e:
            val = pe - pe // p
        elif alpha == e - 1:
            val = -(pe // p)
        else:
            val = 0
        return complex(val) if precision is None else gmpy2.mpc(val)
    if alpha < e - 1:
        return complex(0) if precision is None else gmpy2.mpc(0)
    if alpha >= e:
        return complex(0) if precision is None else gmpy2.mpc(0)
    ap = a // p ** (e - 1)
    chi = kronecker(ap, p)
    if precision is None:
        g = math.sqrt(p) * (1 if p % 4 == 1 else 1j)
        return (pe // p) * chi * g
    with gmpy2.local_context(precision=precision):
        g = gmpy2.sqrt(gmpy2.mpfr(p))
        out = gmpy2.mpc(g, 0) if p % 4 == 1 else gmpy2.mpc(0, g)
        return (pe // p) * chi * out


def _p_valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _salie_pp(a: int, b: int, pe: int, p: int, precision: int | None):
    """Salie sum with character (d/pe) over an odd prime power modulus.

    Closed form eps_pe * sqrt(pe) * (b/pe) * sum_{x^2 = ab} e(2x/pe) when
    gcd(ab, pe) = 1; Gauss/Ramanujan closed form when one index vanishes
    mod pe; direct summation otherwise.
    """
    a %= pe
    b %= pe
    if b == 0:
        e = _p_valuation(pe, p)
        return _salie_gauss_pp(a, e, pe, p, precision)
    if a == 0:
        # d -> dbar swaps the roles of a and b and fixes the character
        e = _p_valuation(pe, p)
        return _salie_gauss_pp(b, e, pe, p, precision)
    ab = (a * b) % pe
    if ab % p == 0:
        return _salie_direct_pp(a, b, pe, p, precision)
    roots = _sqrt_roots(ab, pe)
    chi = kronecker(b, pe)
    if precision is None:
        s = 0j
        tau = 2 * math.pi / pe
        for x in roots:
            s += cmath.exp(1j * (tau * ((2 * x) % pe)))
        eps = 1 if pe % 4 == 1 else 1j
        return chi * eps * math.sqrt(pe) * s
    with gmpy2.local_context(precision=precision):
        s = gmpy2.mpc(0)
        for x in roots:
            s += _exp2pi(Fraction((2 * x) % pe, pe), precision)
        s *= gmpy2.sqrt(gmpy2.mpfr(pe)) * chi
        if pe % 4 == 3:
            s = gmpy2.mpc(-s.imag, s.real)
        return s


def salie_sum(a: int, b: int, c: int, precision: int | None = None):
    """Salie sum sum*_{d mod c} (d/c) e((a dbar + b d)/c) for odd c >= 1.

    Splits multiplicatively over prime powers; each factor is evaluated in
    closed form where possible.  precision=None gives float64, otherwise mpc.
    """
    if c % 2 == 0:
        raise ValueError("Salie modulus must be odd")
    if c == 1:
        return complex(1) if precision is None else gmpy2.mpc(1)
    result = complex(1) if precision is None else gmpy2.mpc(1)
    for p, e in _factorint_cached(c):
        pe = p ** e
        cofactor = c // pe
        cbar = pow(cofactor, -1, pe)
        result = result * _salie_pp((a * cbar) % pe, (b * cbar) % pe, pe, p, precision)
    return result


def _factored_eval(m: int, n: int, c: int, precision: int | None):
    l = (c & -c).bit_length() - 1
    cp = c >> l
    if l < 2:
        raise ValueError("factored evaluation requires 4 | c")
    t = 1 if cp % 4 == 3 else 0
    cpbar = pow(cp, -1, 1 << l)
    tbar = pow(1 << l, -1, cp) if cp > 1 else 0
    if precision is None:
        k2 = _k2_twisted_f64((m * cpbar) % (1 << l), (n * cpbar) % (1 << l), l, t)
    else:
        k2 = _k2_twisted((m * cpbar) % (1 << l), (n * cpbar) % (1 << l), l, t, precision)
    if cp == 1:
        return k2
    sal = salie_sum((m * tbar) % cp, (n * tbar) % cp, cp, precision)
    return k2 * sal


def kloosterman_factored(m: int, n: int, c: int, precision: int = 128):
    """K(m, n, c) for trivial multiplier via the 2-power/Salie factorization."""
    return _factored_eval(m, n, c, precision)


def kloosterman_factored_f64(m: int, n: int, c: int) -> complex:
    """float64 version of kloosterman_factored, for bulk truncation sums."""
    return _factored_eval(m, n, c, None)
