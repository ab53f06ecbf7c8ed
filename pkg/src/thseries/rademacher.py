"""Truncated Rademacher coefficients A_{N,psi}(n), the modified
Selberg-Kloosterman zeta function, the series Z_{N,psi}, and the
theta-corrected series F_[g].

The infinite c-sums are replaced by partial sums up to a configurable c_max;
rounding stability (distance of the assembled real value to the nearest
integer) is the practical convergence signal.  The multiplier system folds
exactly into a shifted Kloosterman index, which lets every term go through
the fast factored evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .kloosterman import MultiplierParams, kloosterman_factored
from .qseries import QSeries, theta_series


class UnconvergedError(RuntimeError):
    """Raised when assembled coefficients stray too far from integers."""

    def __init__(self, label, offenders):
        self.label = label
        self.offenders = offenders  # list of (n, distance)
        worst = max(d for _, d in offenders)
        super().__init__(f"{label}: {len(offenders)} coefficient(s) unconverged "
                         f"(worst distance {float(worst):.3g})")


@dataclass(frozen=True)
class TruncationConfig:
    """Truncation and precision settings for all zeta/coefficient sums."""

    c_max: int = 10_000
    precision: int = 128

    def __post_init__(self):
        if self.c_max < 1:
            raise ValueError("c_max must be positive")
        if self.precision < 53:
            raise ValueError("precision must be at least 53 bits")


@dataclass(frozen=True)
class CoeffEstimate:
    """A truncated coefficient sum with rounding diagnostics."""

    value: object          # BigReal (gmpy2.mpfr)
    imag_residue: object   # BigReal
    c_max: int
    rounded: int
    distance_to_integer: object

    def __post_init__(self):
        if self.distance_to_integer > Fraction(1, 2):
            raise ValueError("distance_to_integer exceeds 1/2")


@dataclass(frozen=True)
class ClassRecord:
    """Multiplier data, theta corrections, and level for one series."""

    label: str
    order: int
    v: int
    h: int
    kappas: tuple          # ((m, Rat), ...)
    level: int
    merged_labels: tuple

    def __post_init__(self):
        if math.gcd(4 * self.order, 96) % self.h != 0:
            raise ValueError(f"{self.label}: h does not divide gcd(4|g|, 96)")
        for m, _ in self.kappas:
            if (self.h * self.order) % (m * m) != 0:
                raise ValueError(f"{self.label}: m^2 = {m * m} does not divide h|g|")
        h_hat = self.h // math.gcd(self.h, 4)
        if self.level != 4 * self.order * h_hat:
            raise ValueError(f"{self.label}: level does not match 4|g|*h_hat")
        v_hat = 4 * self.v // math.gcd(self.h, 4)
        if h_hat > 1 and v_hat % h_hat not in (1, h_hat - 1):
            raise ValueError(f"{self.label}: v_hat is not +-1 mod h_hat")

    @property
    def params(self) -> MultiplierParams:
        return MultiplierParams(self.order, self.v, self.h)


def _rec(label, order, v, h, kappas, level, merged):
    ks = tuple((m, Fraction(k)) for m, k in kappas)
    return ClassRecord(label, order, v, h, ks, level, tuple(merged))


#: the 39 distinct series; merged labels share one series across classes
CLASS_RECORDS = (
    _rec("1A", 1, 0, 1, ((1, 240),), 4, ("1A",)),
    _rec("2A", 2, 0, 1, (), 8, ("2A",)),
    _rec("3A", 3, 1, 3, ((1, -6), (3, 18)), 36, ("3A",)),
    _rec("3B", 3, 0, 1, ((1, 6),), 12, ("3B",)),
    _rec("3C", 3, 2, 3, (), 36, ("3C",)),
    _rec("4A", 4, 0, 1, ((2, 8),), 16, ("4A",)),
    _rec("4B", 4, 7, 8, (), 32, ("4B",)),
    _rec("5A", 5, 0, 1, (), 20, ("5A",)),
    _rec("6A", 6, 5, 6, (), 72, ("6A",)),
    _rec("6B", 6, 2, 3, (), 72, ("6B",)),
    _rec("6C", 6, 0, 1, (), 24, ("6C",)),
    _rec("7A", 7, 0, 1, ((1, 2),), 28, ("7A",)),
    _rec("8A", 8, 7, 8, (), 64, ("8A",)),
    _rec("8B", 8, 13, 16, (), 128, ("8B",)),
    _rec("9A", 9, 0, 1, ((3, 6),), 36, ("9A",)),
    _rec("9B", 9, 0, 1, ((3, -3),), 36, ("9B",)),
    _rec("9C", 9, 1, 3, (), 108, ("9C",)),
    _rec("10A", 10, 0, 1, (), 40, ("10A",)),
    _rec("12AB", 12, 7, 12, ((2, -1), (6, 3)), 144, ("12A", "12B")),
    _rec("12C", 12, 0, 1, ((2, -1),), 48, ("12C",)),
    _rec("12D", 12, 19, 24, (), 288, ("12D",)),
    _rec("13A", 13, 0, 1, ((1, Fraction(1, 3)),), 52, ("13A",)),
    _rec("14A", 14, 0, 1, (), 56, ("14A",)),
    _rec("15AB", 15, 1, 3, (), 180, ("15A", "15B")),
    _rec("18A", 18, 0, 1, (), 72, ("18A",)),
    _rec("18B", 18, 2, 3, (), 216, ("18B",)),
    _rec("19A", 19, 0, 1, ((1, Fraction(3, 5)),), 76, ("19A",)),
    _rec("20A", 20, 7, 8, (), 160, ("20A",)),
    _rec("21A", 21, 1, 3, ((1, Fraction(1, 8)), (3, Fraction(-3, 8))), 252, ("21A",)),
    _rec("24AB", 24, 19, 24, (), 576, ("24A", "24B")),
    _rec("24CD", 24, 37, 48, (), 1152, ("24C", "24D")),
    _rec("27A", 27, 1, 3, ((3, -1), (9, 3)), 324, ("27A",)),
    _rec("27BC", 27, 1, 3, ((3, Fraction(1, 2)), (9, Fraction(-3, 2))), 324,
         ("27B", "27C")),
    _rec("28A", 28, 0, 1, ((2, 1),), 112, ("28A",)),
    _rec("30AB", 30, 2, 3, (), 360, ("30A", "30B")),
    _rec("31AB", 31, 0, 1, ((1, Fraction(-1, 4)),), 124, ("31A", "31B")),
    _rec("36A", 36, 0, 1, ((2, 2), (6, -3)), 144, ("36A",)),
    _rec("36BC", 36, 0, 1, ((2, -1),), 144, ("36B", "36C")),
    _rec("39AB", 39, 1, 3, ((1, Fraction(-3, 7)), (3, Fraction(9, 7))), 468,
         ("39A", "39B")),
)

_BY_LABEL = {}
for _r in CLASS_RECORDS:
    _BY_LABEL[_r.label] = _r
    for _m in _r.merged_labels:
        _BY_LABEL[_m] = _r


def class_record(label: str) -> ClassRecord:
    """Record for a series label or any individual class label it covers."""
    try:
        return _BY_LABEL[label]
    except KeyError:
        raise KeyError(f"unknown class label {label!r}") from None


def delta_odd(k: int) -> int:
    """1 if k is odd, else 0."""
    return k & 1


def bessel_I_half(x, precision: int):
    """I_{1/2}(x) = sqrt(2/(pi*x)) * sinh(x) for x > 0."""
    with gmpy2.local_context(precision=precision):
        x = gmpy2.mpfr(x)
        if x <= 0:
            raise ValueError("argument must be positive")
        return gmpy2.sqrt(2 / (gmpy2.const_pi() * x)) * gmpy2.sinh(x)


def _folded_index(params: MultiplierParams, n: int, c: int) -> int:
    """Shifted index n~ with K_psi(m, n, 4Nc) = K(m, n~, 4Nc), multiplier folded."""
    shift = 4 * params.N * params.v_hat * c * c
    if shift % params.h_hat != 0:
        raise ValueError("multiplier does not fold to an integral shift")
    return n + shift // params.h_hat


def coefficient_A(params: MultiplierParams, n: int, cfg: TruncationConfig = TruncationConfig()):
    """Truncated coefficient A_{N,psi}(n) for n >= 0 with n = 0, 1 (mod 4).

    Returns a CoeffEstimate holding the real value of the (1-i)-weighted
    partial sum over 1 <= c <= cfg.c_max, its imaginary residue, and the
    distance of the value to the nearest integer.
    """
    if n < 0 or n % 4 not in (0, 1):
        raise ValueError("n must be nonnegative with n = 0 or 1 (mod 4)")
    N = params.N
    with gmpy2.local_context(precision=cfg.precision):
        pi = gmpy2.const_pi()
        total = gmpy2.mpc(0)
        for c in range(1, cfg.c_max + 1):
            k = kloosterman_factored(-3, _folded_index(params, n, c), 4 * N * c,
                                     cfg.precision)
            w = 1 + delta_odd(N * c)
            if n == 0:
                total += w * k / gmpy2.sqrt(gmpy2.mpfr(c)) / c
            else:
                x = pi * gmpy2.sqrt(gmpy2.mpfr(3 * n)) / (N * c)
                total += w * k / c * bessel_I_half(x, cfg.precision)
        total *= gmpy2.mpc(1, -1)
        if n == 0:
            total *= pi * gmpy2.sqrt(gmpy2.mpfr(3)) / (2 * gmpy2.mpfr(N) ** gmpy2.mpfr(1.5))
        else:
            total *= (pi * gmpy2.sqrt(gmpy2.mpfr(2)) / (4 * N)
                      * (gmpy2.mpfr(3) / n) ** gmpy2.mpfr(0.25))
        value = total.real
        rounded = int(gmpy2.rint(value))
        return CoeffEstimate(value=value, imag_residue=abs(total.imag),
                             c_max=cfg.c_max, rounded=rounded,
                             distance_to_integer=abs(value - rounded))


def coefficient_A_f64(params: MultiplierParams, n: int, c_max: int):
    """float64 variant of coefficient_A for bulk cache generation.

    Returns (value, imag_residue) as plain floats.
    """
    if n < 0 or n % 4 not in (0, 1):
        raise ValueError("n must be nonnegative with n = 0 or 1 (mod 4)")
    from .kloosterman import kloosterman_factored_f64
    N = params.N
    total = 0j
    for c in range(1, c_max + 1):
        k = kloosterman_factored_f64(-3, _folded_index(params, n, c), 4 * N * c)
        w = 1 + delta_odd(N * c)
        if n == 0:
            total += w * k / (c * math.sqrt(c))
        else:
            x = math.pi * math.sqrt(3 * n) / (N * c)
            total += w * k / c * (math.sqrt(2 / (math.pi * x)) * math.sinh(x))
    total *= (1 - 1j)
    if n == 0:
        total *= math.pi * math.sqrt(3) / (2 * N ** 1.5)
    else:
        total *= math.pi * math.sqrt(2) / (4 * N) * (3 / n) ** 0.25
    return total.real, abs(total.imag)


def zeta_truncated(params: MultiplierParams, m: int, n: int,
                   s=Fraction(3, 4), cfg: TruncationConfig = TruncationConfig()):
    """Partial sum of the modified Selberg-Kloosterman zeta function:
    sum_{c=1}^{c_max} (1-i)(1+delta_odd(Nc)) K_psi(m, n, 4Nc) / (4Nc)^(2s).
    """
    N = params.N
    with gmpy2.local_context(precision=cfg.precision):
        two_s = 2 * gmpy2.mpfr(Fraction(s).numerator) / Fraction(s).denominator
        total = gmpy2.mpc(0)
        for c in range(1, cfg.c_max + 1):
            k = kloosterman_factored(m, _folded_index(params, n, c), 4 * N * c,
                                     cfg.precision)
            w = 1 + delta_odd(N * c)
            total += w * k / gmpy2.mpfr(4 * N * c) ** two_s
        return total * gmpy2.mpc(1, -1)


def series_Z(params: MultiplierParams, n_max: int,
             cfg: TruncationConfig = TruncationConfig(), estimates: dict | None = None) -> QSeries:
    """q^(-3) + sum over 0 <= n <= n_max, n = 0,1 (mod 4), of A(n) q^n.

    Coefficients are the rounded estimates; pass a dict as ``estimates`` to
    collect the underlying CoeffEstimate per exponent.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    coeffs = {-3: Fraction(1)}
    for n in range(0, n_max + 1):
        if n % 4 not in (0, 1):
            continue
        est = coefficient_A(params, n, cfg)
        if estimates is not None:
            estimates[n] = est
        if est.rounded:
            coeffs[n] = Fraction(est.rounded)
    return QSeries(coeffs, 1, n_max + 1)


def theta_coefficient(m: int, n: int) -> int:
    """Coefficient of q^n in theta(m^2 tau): 1 at n = 0, 2 at n = (mk)^2."""
    if n == 0:
        return 1
    q, r = divmod(n, m * m)
    if r:
        return 0
    k = math.isqrt(q)
    return 2 if k * k == q else 0


def series_F(record: ClassRecord, n_max: int,
             cfg: TruncationConfig = TruncationConfig(), threshold=Fraction(1, 10),
             estimates: dict | None = None) -> QSeries:
    """F_[g] = 2 Z + sum_m kappa_{m,g} theta(m^2 tau) up to q^n_max.

    Each coefficient is assembled as 2 A(n) plus the exact theta contribution
    and rounded as a whole (the theta corrections can be non-integral rationals,
    so A(n) alone need not sit near an integer).  Raises UnconvergedError when
    any assembled coefficient sits further than ``threshold`` from the nearest
    integer.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    ests = {} if estimates is None else estimates
    coeffs = {-3: Fraction(2)}
    offenders = []
    with gmpy2.local_context(precision=cfg.precision):
        for n in range(0, n_max + 1):
            if n % 4 not in (0, 1):
                continue
            est = coefficient_A(record.params, n, cfg)
            ests[n] = est
            theta = sum(kappa * theta_coefficient(m, n) for m, kappa in record.kappas)
            total = 2 * est.value + gmpy2.mpq(theta.numerator, theta.denominator)
            rounded = int(gmpy2.rint(gmpy2.mpfr(total)))
            dist = abs(gmpy2.mpfr(total) - rounded)
            if dist > threshold:
                offenders.append((n, dist))
            if rounded:
                coeffs[n] = Fraction(rounded)
    if offenders:
        raise UnconvergedError(record.label, offenders)
    return QSeries(coeffs, 1, n_max + 1)
