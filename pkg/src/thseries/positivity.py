"""Estimate engine for multiplicity positivity: the dominant-term bound |D|,
the two-range remainder bound |R|, the closed-form Kloosterman-zeta bound,
the assembled coefficient bracketing, and the resulting per-character
positivity thresholds with exact checks on cached columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2

from .chartable import CharacterTable
from .numerics import QuadIm
from .rademacher import CLASS_RECORDS, bessel_I_half, class_record


@dataclass(frozen=True)
class BoundInputs:
    """Parameters entering the closed-form zeta bound for one class."""

    N: int
    h_hat: int
    v_hat: int
    n: int

    def __post_init__(self):
        if self.h_hat > 1 and math.gcd(self.N, 24) % self.h_hat != 0:
            raise ValueError("h_hat must divide gcd(N, 24)")

    @property
    def D(self) -> int:
        return -3 * self.n

    @staticmethod
    def for_class(label: str, n: int) -> "BoundInputs":
        rec = class_record(label)
        p = rec.params
        return BoundInputs(rec.order, p.h_hat, p.v_hat, n)


@dataclass
class PositivityReport:
    """Per-character thresholds plus the exact-range verdicts."""

    thresholds: dict      # character index -> n0
    scan_range: tuple
    exact_range: tuple
    exact_failures: list
    reference_threshold: int = 375


def _ctx(precision: int):
    return gmpy2.local_context(precision=precision)


def bound_D(N: int, n: int, precision: int = 128):
    """Upper bound (2 sqrt(N) / (pi (3n)^(1/4))) e^(pi sqrt(3n)/N)."""
    if n <= 0:
        raise ValueError("n must be positive")
    with _ctx(precision):
        pi = gmpy2.const_pi()
        tn = gmpy2.mpfr(3 * n)
        return (2 * gmpy2.sqrt(gmpy2.mpfr(N)) / (pi * tn ** gmpy2.mpfr(0.25))
                * gmpy2.exp(pi * gmpy2.sqrt(tn) / N))


def exact_D_1A(n: int, precision: int = 128):
    """The exact dominant term for the level-4 series:
    (-1)^n (I_{1/2}(pi sqrt(3n)) - sqrt(2) (3n)^(1/4))."""
    with _ctx(precision):
        pi = gmpy2.const_pi()
        tn = gmpy2.mpfr(3 * n)
        val = bessel_I_half(pi * gmpy2.sqrt(tn), precision) \
            - gmpy2.sqrt(gmpy2.mpfr(2)) * tn ** gmpy2.mpfr(0.25)
        return -val if n % 2 else val


def bound_R(N: int, n: int, precision: int = 128):
    """Mid-range bound sqrt(3 pi n)/N e^(pi sqrt(3n)/(2N)) plus the
    zeta(5/2) tail 2 pi^2 (3n)^(5/4) zeta(5/2) / (5 N^(5/2))."""
    if n <= 0:
        raise ValueError("n must be positive")
    with _ctx(precision):
        pi = gmpy2.const_pi()
        tn = gmpy2.mpfr(3 * n)
        mid = gmpy2.sqrt(pi * tn) / N * gmpy2.exp(pi * gmpy2.sqrt(tn) / (2 * N))
        tail = (2 * pi ** 2 * tn ** gmpy2.mpfr(1.25) * gmpy2.zeta(gmpy2.mpfr(2.5))
                / (5 * gmpy2.mpfr(N) ** gmpy2.mpfr(2.5)))
        return mid + tail


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


def bound_zeta(inputs: BoundInputs, precision: int = 128):
    """Closed-form upper bound for the Kloosterman-zeta remainder |Z*|."""
    if inputs.n < 40:
        raise ValueError("the zeta bound requires n >= 40")
    with _ctx(precision):
        N = gmpy2.mpfr(inputs.N)
        h = gmpy2.mpfr(inputs.h_hat)
        absD = gmpy2.mpfr(abs(inputs.D))
        pref = gmpy2.mpfr(1) / 4
        for p in _prime_divisors(4 * inputs.N * inputs.h_hat):
            pref *= 1 + gmpy2.mpfr(1) / p
        pref *= 1 + gmpy2.mpfr("2.13") * absD ** (gmpy2.mpfr(1) / 8) * gmpy2.log(absD)
        if inputs.N == 2:
            poly = 3872 * absD + 213 * absD ** gmpy2.mpfr(1.5)
        else:
            r = gmpy2.mpfr
            c1 = (r("6.124") * N ** (r(35) / 6) * h ** (r(47) / 6)
                  - r("3.09") * N ** (r(23) / 4) * h ** (r(31) / 4)
                  + r("64.32") * N ** (r(29) / 6) * h ** 7
                  - 23 * N ** (r(19) / 4) * h ** 7)
            c2 = (r("0.146") * N ** (r(47) / 6) * h ** (r(65) / 6)
                  - r("0.114") * N ** (r(31) / 4) * h ** (r(43) / 4)
                  + r("2.51") * N ** (r(35) / 6) * h ** 10
                  - r("0.74") * N ** (r(23) / 4) * h ** 10)
            poly = c1 * absD + c2 * absD ** gmpy2.mpfr(1.5)
        return pref * poly


def coefficient_upper_bound(label: str, n: int, precision: int = 128):
    """Upper bound on the normalized coefficient magnitude |C_[g](n)|:
    |D| + |R| + sqrt(8) (3n)^(1/4) |Z*|."""
    rec = class_record(label)
    inputs = BoundInputs.for_class(label, n)
    with _ctx(precision):
        tn = gmpy2.mpfr(3 * n)
        z = bound_zeta(inputs, precision)
        return (bound_D(rec.order, n, precision) + bound_R(rec.order, n, precision)
                + gmpy2.sqrt(gmpy2.mpfr(8)) * tn ** gmpy2.mpfr(0.25) * z)


def coefficient_lower_bound_1A(n: int, precision: int = 128):
    """Lower bound |D_1A| - |R| - sqrt(8) (3n)^(1/4) |Z*| for the level-4 series."""
    inputs = BoundInputs.for_class("1A", n)
    with _ctx(precision):
        tn = gmpy2.mpfr(3 * n)
        z = bound_zeta(inputs, precision)
        return (abs(exact_D_1A(n, precision)) - bound_R(1, n, precision)
                - gmpy2.sqrt(gmpy2.mpfr(8)) * tn ** gmpy2.mpfr(0.25) * z)


def _c_from_A(label: str, a_value, n: int, precision: int):
    """Normalized coefficient C(n) with A(n) = pi sqrt(2) (3/n)^(1/4) C(n)."""
    with _ctx(precision):
        pi = gmpy2.const_pi()
        return ((gmpy2.mpfr(n) / 3) ** gmpy2.mpfr(0.25)
                / (pi * gmpy2.sqrt(gmpy2.mpfr(2))) * gmpy2.mpfr(a_value))


def truncated_C(label: str, n: int, c_max: int = 2000):
    """Truncated normalized coefficient, float64 path (oracle for the bounds)."""
    from .rademacher import coefficient_A_f64
    rec = class_record(label)
    v, _ = coefficient_A_f64(rec.params, n, c_max)
    return float(_c_from_A(label, v, n, 64))


@lru_cache(maxsize=1 << 16)
def _series_coeff_bound(label: str, n: int, precision: int):
    """Upper bound on |F_[g](n)| = |2 A(n) + theta part|."""
    rec = class_record(label)
    with _ctx(precision):
        pi = gmpy2.const_pi()
        scale = (pi * gmpy2.sqrt(gmpy2.mpfr(2))
                 * (gmpy2.mpfr(3) / n) ** gmpy2.mpfr(0.25))
        theta = sum(abs(k) for _, k in rec.kappas)
        return 2 * scale * coefficient_upper_bound(label, n, precision) + 2 * float(theta)


@lru_cache(maxsize=1 << 16)
def _series_coeff_lower_1A(n: int, precision: int):
    rec = class_record("1A")
    with _ctx(precision):
        pi = gmpy2.const_pi()
        scale = (pi * gmpy2.sqrt(gmpy2.mpfr(2))
                 * (gmpy2.mpfr(3) / n) ** gmpy2.mpfr(0.25))
        theta = sum(abs(k) for _, k in rec.kappas)
        return 2 * scale * coefficient_lower_bound_1A(n, precision) - 2 * float(theta)


def multiplicity_lower_bound(char_index: int, n: int, precision: int = 128,
                             table: CharacterTable | None = None):
    """(|strace(1)|/|G|) chi(1) - sum over nontrivial classes of
    (|strace(g)|/|C(g)|) |chi(g)|, with strace magnitudes replaced by the
    section-4 bracketing bounds."""
    if table is None:
        table = CharacterTable.load()
    with _ctx(precision):
        low_1a = _series_coeff_lower_1A(n, precision)
        chi_1 = gmpy2.mpfr(table.value(char_index, "1A").as_rat())
        total = low_1a / table.group_order * chi_1
        for rec in CLASS_RECORDS:
            up = _series_coeff_bound(rec.label, n, precision)
            for lbl in rec.merged_labels:
                if lbl == "1A":
                    continue
                chi = table.value(char_index, lbl)
                chi_abs = gmpy2.sqrt(gmpy2.mpfr(chi.norm()))
                total -= up / table.centralizer_order(lbl) * chi_abs
        return total


def positivity_threshold(char_index: int, precision: int = 128,
                         scan_max: int = 10_000, coarse: int = 16) -> int:
    """Least sampled n0 >= 40 with the multiplicity lower bound positive from
    n0 through scan_max (coarse geometric-ish sampling keeps this fast; the
    bound is eventually monotone since the trivial-class term dominates)."""
    table = CharacterTable.load()
    samples = []
    n = 40
    while n <= scan_max:
        samples.append(n)
        n += coarse if n >= 200 else 4
    positive = [n for n in samples
                if multiplicity_lower_bound(char_index, n, precision, table) > 0]
    if not positive:
        raise ValueError(f"no positive sample up to {scan_max} for character {char_index}")
    # first sample from which every later sample is positive
    posset = set(positive)
    for i, n in enumerate(samples):
        if all(m in posset for m in samples[i:]):
            return n
    raise AssertionError("unreachable")


def exact_positivity_check(columns: dict, table: CharacterTable | None = None) -> dict:
    """Exact decomposition of cached coefficient columns; multiplicities must
    be nonnegative, and positive for the trivial character.

    ``columns`` maps exponent n >= 0 to {class label: integer coefficient}.
    """
    if table is None:
        table = CharacterTable.load()
    failures = []
    for n in sorted(columns):
        if n < 0:
            continue
        mv = table.decompose(columns[n], n)
        if not mv.is_integral():
            failures.append({"n": n, "issue": "non-integral"})
            continue
        for j, v in enumerate(mv.values, start=1):
            # the first two columns are single irreducibles (chi_2 and
            # chi_4 + chi_5), so trivial positivity starts at n = 5
            bad = v < 0 or (j == 1 and n >= 5 and v <= 0)
            if bad:
                failures.append({"n": n, "character": j, "multiplicity": str(v)})
    return {"columns": len([n for n in columns if n >= 0]),
            "failures": failures, "passed": not failures}
