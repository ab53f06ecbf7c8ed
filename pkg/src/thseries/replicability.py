"""Replicability machinery: bivariate H-tables from log(f(tau_1) - f(tau_2)),
the replicability predicate, the even/odd split quotients t^(0), t^(1), t,
and verification of the tabulated rational-function identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .qseries import EtaQuotient, QSeries, eta_expansion, substitute_quarter, theta_series


class BivariateSeries:
    """Coefficients H_{m,n} for 1 <= m, n <= cutoff."""

    def __init__(self, entries: dict, cutoff: int):
        self.entries = dict(entries)
        self.cutoff = cutoff

    def __getitem__(self, key):
        return self.entries.get(key, Fraction(0))

    def is_symmetric(self) -> bool:
        return all(self[(m, n)] == self[(n, m)]
                   for (m, n) in self.entries)


def _bi_mul(a: dict, b: dict, cutoff: int) -> dict:
    out = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            i, j = i1 + i2, j1 + j2
            if i <= cutoff and j <= cutoff:
                out[(i, j)] = out.get((i, j), Fraction(0)) + v1 * v2
    return out


def h_table(f: QSeries, cutoff: int) -> BivariateSeries:
    """H_{m,n} with log(f(tau_1)-f(tau_2)) = log(q1^-1 - q2^-1) - sum H q1^m q2^n.

    Uses f1 - f2 = (q1^-1 - q2^-1)(1 - q1 q2 S) where S comes from the
    divided differences (q1^n - q2^n)/(q1 - q2).
    """
    if f.denom != 1 or f.min_exponent() != -1 or f.coefficient(-1) != 1:
        raise ValueError("f must have leading term q^-1 on the integer lattice")
    if f.trunc < cutoff:
        raise ValueError("f is not known to the requested cutoff")
    s = {}
    for e in f.support():
        n = int(e)
        if n < 1:
            continue
        a = f.coefficient(e)
        for i in range(n):
            j = n - 1 - i
            if i + 1 <= cutoff and j + 1 <= cutoff:
                s[(i, j)] = s.get((i, j), Fraction(0)) + a
    # -log(1 - q1 q2 S) = sum_k (q1 q2 S)^k / k; shift S by (1,1) first
    g = {(i + 1, j + 1): v for (i, j), v in s.items()
         if i + 1 <= cutoff and j + 1 <= cutoff}
    entries = {}
    term = {(0, 0): Fraction(1)}
    k = 1
    while k <= cutoff:
        term = _bi_mul(term, g, cutoff)
        if not term:
            break
        for key, v in term.items():
            entries[key] = entries.get(key, Fraction(0)) + v / k
        k += 1
    return BivariateSeries(entries, cutoff)


def is_replicable(H: BivariateSeries) -> dict:
    """Check H_{a,b} = H_{c,d} whenever ab = cd and gcd(a,b) = gcd(c,d)."""
    by_product = {}
    M = H.cutoff
    for a in range(1, M + 1):
        for b in range(1, M + 1):
            key = (a * b, math.gcd(a, b))
            by_product.setdefault(key, []).append((a, b))
    violations = []
    checked = 0
    for (prod, g), pairs in by_product.items():
        ref = H[pairs[0]]
        for pair in pairs[1:]:
            checked += 1
            if H[pair] != ref:
                violations.append({"pairs": (pairs[0], pair), "product": prod,
                                   "gcd": g, "values": (str(ref), str(H[pair]))})
    return {"comparisons": checked, "violations": violations,
            "passed": not violations}


def split_series(F: QSeries):
    """Partition into the exponent-0 (mod 4) part and the {-3, 1 mod 4} part."""
    if F.denom != 1:
        raise ValueError("series must live on the integer lattice")
    c0, c1 = {}, {}
    for e in F.support():
        n = int(e)
        if n >= 0 and n % 4 == 0:
            c0[n] = F.coefficient(e)
        elif n == -3 or (n >= 0 and n % 4 == 1):
            c1[n] = F.coefficient(e)
        else:
            raise ValueError(f"unsupported exponent {n} in plus-space series")
    return (QSeries(c0, 1, F.trunc), QSeries(c1, 1, F.trunc))


def theta_component(j: int, order) -> QSeries:
    """theta^(0) = sum q^(n^2); theta^(1) = sum q^((n+1/2)^2)."""
    order = Fraction(order)
    if j == 0:
        return theta_series(1, order)
    if j == 1:
        coeffs = {}
        k = 1
        while Fraction(k * k, 4) < order:
            coeffs[k * k] = Fraction(2)
            k += 2
        return QSeries(coeffs, 4, order)
    raise ValueError("component index must be 0 or 1")


def t_series(F: QSeries, j: int) -> QSeries:
    """t^(j) = (component j of F)(tau/4) / theta^(j)(tau)."""
    comp = split_series(F)[j]
    num = substitute_quarter(comp)
    den = theta_component(j, num.trunc - num.min_exponent() if num.coeffs
                          else num.trunc)
    t = num * den.invert()
    if any((Fraction(k, t.denom)).denominator != 1 for k in t.coeffs):
        raise ValueError("t-series has non-integral exponents")
    return t


@dataclass(frozen=True)
class ReplIdentity:
    """One tabulated identity: component of t_[g] as a rational function of x."""

    label: str
    component: str        # "t0", "t1", or "t"
    x: EtaQuotient | None
    is_sum: bool
    numerator: tuple      # ((degree, int), ...)
    denominator: tuple


def _parse_poly(tok: str):
    if tok == "0":
        return ()
    return tuple((int(d), int(c)) for d, c in
                 (t.split(":") for t in tok.split(",")))


def load_identities():
    text = resources.files("thseries.data").joinpath("repl_identities.txt").read_text()
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        label, comp, xspec, num, slash, den = line.split()
        assert slash == "/"
        x = None
        is_sum = xspec == "sum"
        if xspec not in ("-", "sum"):
            x = EtaQuotient(tuple((int(d), int(r)) for d, r in
                                  (t.split(":") for t in xspec.split(","))))
        out.append(ReplIdentity(label, comp, x, is_sum,
                                _parse_poly(num), _parse_poly(den)))
    return out


def _eval_laurent(poly, x: QSeries, order) -> QSeries:
    out = QSeries.zero(order)
    if not poly:
        return out
    xinv = None
    for d, c in poly:
        if d == 0:
            out = out + c
        elif d > 0:
            out = out + c * (x ** d)
        else:
            if xinv is None:
                xinv = x.invert()
            out = out + c * (xinv ** (-d))
    return out.truncate(order)


def verify_identity(identity: ReplIdentity, F: QSeries, order: int) -> dict:
    """Compare the tabulated rational function of x against the t-series."""
    comp = {"t0": 0, "t1": 1}.get(identity.component)
    if identity.is_sum or comp is None:
        t = t_series(F, 0) + t_series(F, 1)
    else:
        t = t_series(F, comp)
    order = min(Fraction(order), t.trunc)
    if identity.is_sum:
        rhs = t_series(F, 0) + t_series(F, 1)
    elif identity.x is None:
        rhs = _eval_laurent(identity.numerator, QSeries.zero(order), order)
    else:
        margin = 8
        lead = -min((d for d, _ in identity.numerator), default=0)
        x = eta_expansion(identity.x, order + max(0, lead) + margin)
        num = _eval_laurent(identity.numerator, x, order)
        den = _eval_laurent(identity.denominator, x, order)
        rhs = (num * den.invert()).truncate(order)
    mismatches = []
    lo = min(t.min_exponent() or 0, rhs.min_exponent() or 0)
    e = Fraction(lo)
    while e < order:
        if (e * t.denom).denominator == 1 or (e * rhs.denom).denominator == 1:
            a = t.coefficient(e) if e < t.trunc else None
            b = rhs.coefficient(e) if e < rhs.trunc else None
            if a is not None and b is not None and a != b:
                mismatches.append({"exponent": str(e), "t": str(a), "rhs": str(b)})
                if len(mismatches) >= 5:
                    break
        e += 1
    return {"label": identity.label, "component": identity.component,
            "order": str(order), "mismatches": mismatches,
            "passed": not mismatches}
