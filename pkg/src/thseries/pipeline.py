"""Integrality machinery: the coefficient matrices C and C+, the reduction
matrices N and N*, per-prime matrices M_p, linear-relation and congruence
verification, and the p-integrality certificates.

Everything in this module is exact rational (or quadratic-imaginary)
arithmetic; there is no tolerance anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .chartable import CharacterTable
from .numerics import QuadIm
from .rademacher import CLASS_RECORDS, class_record

Rat = Fraction

#: theta row labels, keyed by m^2 for theta(m^2 tau), m in {1,2,3,6,9}
THETA_LABELS = ("th1", "th4", "th9", "th36", "th81")
_THETA_M = {"th1": 1, "th4": 2, "th9": 3, "th36": 6, "th81": 9}

SERIES_LABELS = tuple(r.label for r in CLASS_RECORDS)


def _theta_entry(m: int, e) -> int:
    if e < 0:
        return 0
    if e == 0:
        return 1
    q, r = divmod(e, m * m)
    if r != 0:
        return 0
    k = math.isqrt(q)
    return 2 if k * k == q else 0


class CoeffMatrix:
    """Series and theta coefficient rows over a fixed exponent column range.

    Stores the 39 distinct series rows plus the 5 theta rows; the expanded
    view duplicates merged series across their individual class labels.
    """

    def __init__(self, exponents, series_rows):
        self.exponents = list(exponents)
        self.rows = {}
        missing = [lbl for lbl in SERIES_LABELS if lbl not in series_rows]
        if missing:
            raise ValueError(f"missing series rows: {missing}")
        for lbl in SERIES_LABELS:
            row = [int(series_rows[lbl][e]) for e in self.exponents]
            at = {e: v for e, v in zip(self.exponents, row)}
            if at.get(-3) != 2:
                raise ValueError(f"series row {lbl} must have entry 2 at column -3")
            self.rows[lbl] = row
        for lbl in THETA_LABELS:
            m = _THETA_M[lbl]
            self.rows[lbl] = [_theta_entry(m, e) for e in self.exponents]

    @staticmethod
    def from_coefficients(coeffs: dict, exponents=None) -> "CoeffMatrix":
        """Build from {series label: {exponent: integer coefficient}}."""
        if exponents is None:
            common = None
            for lbl in SERIES_LABELS:
                have = set(coeffs.get(lbl, ()))
                common = have if common is None else common & have
            exponents = sorted(common or ())
        return CoeffMatrix(exponents, coeffs)

    def row(self, label):
        return self.rows[label]

    @property
    def expanded_labels(self):
        """48 individual class labels (table order) + 5 theta labels."""
        table = CharacterTable.load()
        return list(table.classes) + list(THETA_LABELS)

    def expanded_row(self, label):
        """Row for an individual class label or theta label."""
        if label in self.rows:
            return self.rows[label]
        return self.rows[class_record(label).label]

    def expanded_matrix(self):
        return [self.expanded_row(lbl) for lbl in self.expanded_labels]

    def column(self, e):
        j = self.exponents.index(e)
        return {lbl: self.rows[lbl][j] for lbl in self.rows}


@dataclass(frozen=True)
class CongruenceSpec:
    """Sum of a_g * row_g vanishing mod a prime power on every column."""

    terms: tuple          # ((label, int coefficient), ...)
    modulus: int

    @property
    def prime(self) -> int:
        p = _least_prime(self.modulus)
        if p ** round(math.log(self.modulus, p)) != self.modulus:
            raise ValueError(f"modulus {self.modulus} is not a prime power")
        return p

    @property
    def exponent(self) -> int:
        p = self.prime
        s = 0
        m = self.modulus
        while m > 1:
            m //= p
            s += 1
        return s


def _least_prime(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def _load_terms(path_name: str):
    text = resources.files("thseries.data").joinpath(path_name).read_text()
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(line.split())
    return out


def load_relations():
    """The exact linear relations as lists of (label, Rat) terms."""
    rels = []
    for toks in _load_terms("relations.txt"):
        rels.append(tuple((lbl, Fraction(c)) for lbl, c in
                          (t.split(":") for t in toks)))
    return rels


def load_congruences():
    specs = []
    for toks in _load_terms("congruences.txt"):
        modulus = int(toks[0])
        terms = tuple((lbl, int(c)) for lbl, c in
                      (t.split(":") for t in toks[1:]))
        specs.append(CongruenceSpec(terms, modulus))
    return specs


def verify_linear_relations(cm: CoeffMatrix, relations=None) -> dict:
    """Check each relation sums to exact zero on every column."""
    if relations is None:
        relations = load_relations()
    failures = []
    for rel in relations:
        for j, e in enumerate(cm.exponents):
            acc = sum(c * cm.rows[lbl][j] for lbl, c in rel)
            if acc != 0:
                failures.append({"relation": _fmt_terms(rel), "column": e,
                                 "residual": str(acc)})
    return {"relations_checked": len(relations),
            "columns": len(cm.exponents),
            "failures": failures, "passed": not failures}


def verify_congruences(cm: CoeffMatrix, specs=None) -> dict:
    """Check every congruence spec plus the mod-2 parity rules."""
    if specs is None:
        specs = load_congruences()
    failures = []
    for spec in specs:
        for j, e in enumerate(cm.exponents):
            acc = sum(c * cm.rows[lbl][j] for lbl, c in spec.terms)
            if acc % spec.modulus != 0:
                failures.append({"congruence": _fmt_terms(spec.terms),
                                 "modulus": spec.modulus, "column": e,
                                 "residue": acc % spec.modulus})
    parity_checked = 0
    for rec in CLASS_RECORDS:
        if rec.order % 2 == 1:
            parity_checked += 1
            for j, e in enumerate(cm.exponents):
                if e == 0:
                    continue
                if cm.rows[rec.label][j] % 2 != 0:
                    failures.append({"congruence": f"[{rec.label}] parity",
                                     "modulus": 2, "column": e,
                                     "residue": cm.rows[rec.label][j] % 2})
    for lbl in THETA_LABELS:
        parity_checked += 1
        for j, e in enumerate(cm.exponents):
            want = 1 if e == 0 else 0
            if (cm.rows[lbl][j] - want) % 2 != 0:
                failures.append({"congruence": f"[{lbl}] parity", "modulus": 2,
                                 "column": e, "residue": cm.rows[lbl][j] % 2})
    return {"congruences_checked": len(specs), "parity_rules": parity_checked,
            "columns": len(cm.exponents), "failures": failures,
            "passed": not failures}


def _fmt_terms(terms):
    return " ".join(f"{c}[{lbl}]" for lbl, c in terms)


# ---------------------------------------------------------------------------
# Exact linear algebra helpers (dense, Fraction entries)
# ---------------------------------------------------------------------------

def _rank(rows) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    col = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def _rank_mod_p(rows, p: int) -> int:
    m = [[int(x) % p for x in r] for r in rows]
    rank = 0
    for col in range(len(m[0]) if m else 0):
        piv = next((i for i in range(rank, len(m)) if m[i][col] % p != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def _invert(mat):
    n = len(mat)
    a = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def _row_space_solver(basis_rows):
    """Returns solve(target) -> x with x . basis_rows = target (or None).

    The pivot-column selection and square-block inversion are done once.
    """
    k = len(basis_rows)
    m = [list(map(Fraction, r)) for r in basis_rows]
    ncols = len(m[0])
    # pivot columns via elimination on a working copy of the transpose probe
    work = [row[:] for row in m]
    cols = []
    r = 0
    for j in range(ncols):
        piv = next((i for i in range(r, k) if work[i][j] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][j]
        work[r] = [x * inv for x in work[r]]
        for i in range(k):
            if i != r and work[i][j] != 0:
                f = work[i][j]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        cols.append(j)
        r += 1
        if r == k:
            break
    if len(cols) < k:
        raise ValueError("basis rows are dependent")
    sq_inv = _invert([[m[i][j] for j in cols] for i in range(k)])

    def solve(target):
        y = [Fraction(target[j]) for j in cols]
        x = [sum(sq_inv[j][i] * y[j] for j in range(k)) for i in range(k)]
        for j in range(ncols):
            if sum(x[i] * m[i][j] for i in range(k)) != target[j]:
                return None
        return x

    return solve


# ---------------------------------------------------------------------------
# Reduction and per-prime matrices
# ---------------------------------------------------------------------------

#: duplicate rows removed first (the later label of each merged pair)
DUPLICATE_DELETIONS = ("12B", "15B", "24B", "24D", "27C", "30B", "31B",
                       "36C", "39B")

#: rows expressible through the shipped linear relations
RELATION_DELETIONS = ("9A", "9B", "18A", "27B", "36B")


#: large prime for fast probabilistic rank scans (confirmed exactly afterwards)
_RANK_PRIME = (1 << 61) - 1


@dataclass
class PipelineMatrices:
    """The exact factorization data: X, N, N*, retained labels, and M_p."""

    X: list               # 48 x 48 QuadIm
    N: list               # 48 x 35 Rat
    Nstar: list           # 35 x 53 0/1 selection
    retained_labels: list
    deleted_labels: list
    Mp: dict              # prime -> 35 x 35 Rat
    XN: list | None = None        # 48 x 35 QuadIm, shared across primes
    direct_cache: dict | None = None   # exponent -> MultiplicityVector


def build_X(table: CharacterTable | None = None):
    """48 x 48 matrix with X[j][g] = conj(chi_j(g)) / |C(g)|."""
    if table is None:
        table = CharacterTable.load()
    X = []
    for j in range(1, 49):
        row = []
        for g in table.classes:
            row.append(table.value(j, g).conj() / table.centralizer_order(g))
        X.append(row)
    return X


def build_reduction(cm: CoeffMatrix) -> PipelineMatrices:
    """Selection matrix N* (35 x 53) and reconstruction matrix N (48 x 35).

    Deletes duplicate rows, then relation-dependent rows, then completes
    greedily (highest level first) until 35 independent rows remain; N is
    solved exactly so that every expanded class row is N times the retained
    block.
    """
    expanded = cm.expanded_labels
    emat = cm.expanded_matrix()
    # rows are integers, so rank scans run mod a large prime; exactness of the
    # final selection is certified by the row-space solver below
    target_rank = _rank_mod_p(emat, _RANK_PRIME)
    deleted = list(DUPLICATE_DELETIONS) + list(RELATION_DELETIONS)
    retained = [lbl for lbl in expanded if lbl not in deleted]
    retained_m = [cm.expanded_row(lbl) for lbl in retained]
    if _rank_mod_p(retained_m, _RANK_PRIME) != target_rank:
        raise ValueError("prescribed deletions drop the rank")

    def level_key(lbl):
        if lbl in _THETA_M:
            return (0, lbl)          # theta rows deleted last
        return (-class_record(lbl).level, lbl)

    # congruence pivots must survive; prefer deleting unreferenced rows
    referenced = set()
    for spec in load_congruences():
        for lbl, _ in spec.terms:
            rec_lbl = lbl if lbl in _THETA_M else class_record(lbl).merged_labels[0]
            referenced.add(rec_lbl)
    order = sorted(retained, key=lambda l: (l in referenced,) + level_key(l))
    while len(retained) > target_rank:
        for lbl in order:
            if lbl not in retained:
                continue
            trial = [cm.expanded_row(x) for x in retained if x != lbl]
            if _rank_mod_p(trial, _RANK_PRIME) == target_rank:
                retained.remove(lbl)
                deleted.append(lbl)
                break
        else:
            raise ValueError("no deletion preserves the rank")
    retained_m = [cm.expanded_row(lbl) for lbl in retained]

    Nstar = [[1 if expanded[j] == lbl else 0 for j in range(len(expanded))]
             for lbl in retained]
    table = CharacterTable.load()
    solve = _row_space_solver(retained_m)
    N = []
    for g in table.classes:
        x = solve(cm.expanded_row(g))
        if x is None:
            raise ValueError(f"class row {g} not reconstructible from retained rows")
        N.append(x)
    X = build_X(table)
    return PipelineMatrices(X=X, N=N, Nstar=Nstar,
                            retained_labels=retained, deleted_labels=deleted,
                            Mp={}, XN=_split_product(X, N, len(retained)),
                            direct_cache={})


def build_Mp(p: int, retained_labels, specs=None):
    """35 x 35 rational M_p: identity with congruence rows substituted at the
    highest-level class of each congruence (ties broken lexicographically).
    """
    if specs is None:
        specs = load_congruences()
    idx = {lbl: i for i, lbl in enumerate(retained_labels)}
    n = len(retained_labels)
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    replaced = set()
    used = []
    for spec in specs:
        if spec.prime != p:
            continue
        mapped = []
        ok = True
        for lbl, c in spec.terms:
            rep = lbl if lbl in _THETA_M else class_record(lbl).merged_labels[0]
            if rep not in idx:
                ok = False
                break
            mapped.append((rep, c))
        if not ok:
            continue
        classes = [(class_record(lbl).level, lbl) for lbl, _ in mapped
                   if lbl not in _THETA_M]
        for _, pivot in sorted(classes, key=lambda t: (-t[0], t[1])):
            if pivot not in replaced:
                break
        else:
            continue
        if pivot in replaced:
            continue
        row = [Fraction(0)] * n
        for lbl, c in mapped:
            row[idx[lbl]] += Fraction(c, spec.modulus)
        if row[idx[pivot]] == 0:
            continue
        M[idx[pivot]] = row
        replaced.add(pivot)
        used.append((spec, pivot))
    _invert(M)  # raises if singular
    return M, used


def _is_p_integral(x: Fraction, p: int) -> bool:
    return x.denominator % p != 0


def _split_product(X, N, k):
    """(radicands, XNa, XNb) with XN = X N over split real/radical coordinates.

    Each character row of X touches at most one radicand, which is what makes
    the split representation well defined row by row.
    """
    rads = []
    XNa = []
    XNb = []
    for i in range(48):
        d = 0
        for g in range(48):
            if X[i][g].b != 0:
                if d and X[i][g].d != d:
                    raise ValueError(f"mixed radicands in character row {i + 1}")
                d = X[i][g].d
        rads.append(d)
        row_a = [X[i][g].a for g in range(48)]
        row_b = [X[i][g].b for g in range(48)]
        XNa.append([sum(row_a[g] * N[g][r] for g in range(48) if row_a[g])
                    for r in range(k)])
        XNb.append([sum(row_b[g] * N[g][r] for g in range(48) if row_b[g])
                    for r in range(k)])
    return rads, XNa, XNb


def integrality_certificate(p: int, cm: CoeffMatrix,
                            mats: PipelineMatrices | None = None) -> dict:
    """Certificate that every multiplicity column is p-integral.

    Checks (a) M_p N* C+ integral, (b) X N M_p^{-1} has p-free denominators,
    (c) M_p N* C+ has full rank mod p, and (d) the factored product equals
    the direct multiplicity decomposition columnwise.
    """
    if mats is None:
        mats = build_reduction(cm)
    Mp, used = build_Mp(p, mats.retained_labels)
    retained_m = [cm.expanded_row(lbl) for lbl in mats.retained_labels]
    k = len(mats.retained_labels)
    ncols = len(cm.exponents)
    violations = []

    # (a) A = M_p (N* C+) integral
    A = [[sum(Mp[i][r] * retained_m[r][j] for r in range(k) if Mp[i][r])
          for j in range(ncols)] for i in range(k)]
    for i in range(k):
        for j in range(ncols):
            if A[i][j].denominator != 1:
                violations.append({"check": "MpNstarC_integral",
                                   "row": mats.retained_labels[i],
                                   "column": cm.exponents[j],
                                   "entry": str(A[i][j])})
    # (b) B = X N M_p^{-1} p-integral, over split real/radical coordinates
    Mp_inv = _invert(Mp)
    rads, XNa, XNb = mats.XN if mats.XN is not None \
        else _split_product(mats.X, mats.N, k)
    Ba = [[sum(XNa[i][r] * Mp_inv[r][s] for r in range(k) if XNa[i][r])
           for s in range(k)] for i in range(48)]
    Bb = [[sum(XNb[i][r] * Mp_inv[r][s] for r in range(k) if XNb[i][r])
           for s in range(k)] for i in range(48)]
    for i in range(48):
        for s in range(k):
            if not (_is_p_integral(Ba[i][s], p) and _is_p_integral(Bb[i][s], p)):
                violations.append({"check": "XNMpinv_p_integral",
                                   "character": i + 1,
                                   "column": mats.retained_labels[s],
                                   "entry": repr(QuadIm(Ba[i][s], Bb[i][s],
                                                        rads[i]))})
    # (c) full rank mod p
    rank_p = _rank_mod_p([[int(x) for x in row] for row in A], p) \
        if not any(v["check"] == "MpNstarC_integral" for v in violations) else -1
    if rank_p != k:
        violations.append({"check": "rank_mod_p", "rank": rank_p, "expected": k})
    # (d) two-path equality with the direct decomposition
    table = CharacterTable.load()
    direct_cache = mats.direct_cache if mats.direct_cache is not None else {}
    mismatch = 0
    for j, e in enumerate(cm.exponents):
        if e < 0:
            continue
        sign = (-1) ** e
        if e not in direct_cache:
            omega = {g: cm.expanded_row(g)[j] for g in table.classes}
            direct_cache[e] = table.decompose(omega, e)
        direct = direct_cache[e]
        col = [A[s][j] for s in range(k)]
        for i in range(48):
            va = sign * sum(Ba[i][s] * col[s] for s in range(k) if Ba[i][s])
            vb = sum(Bb[i][s] * col[s] for s in range(k) if Bb[i][s])
            if vb != 0 or va != direct.values[i]:
                mismatch += 1
                if mismatch <= 5:
                    violations.append({"check": "two_path", "column": e,
                                       "character": i + 1,
                                       "factored": f"{va}+{vb}*sqrt(-{rads[i]})",
                                       "direct": str(direct.values[i])})
    return {"prime": p, "congruences_used": len(used),
            "rank_mod_p": rank_p, "violations": violations,
            "passed": not violations}


def left_kernel_regression(cm: CoeffMatrix, specs=None) -> dict:
    """Every listed congruence, reduced mod its prime, annihilates C+ mod p."""
    if specs is None:
        specs = load_congruences()
    failures = []
    for spec in specs:
        p = spec.prime
        for j, e in enumerate(cm.exponents):
            acc = sum(c * cm.rows[lbl][j] for lbl, c in spec.terms)
            if acc % p != 0:
                failures.append({"congruence": _fmt_terms(spec.terms),
                                 "prime": p, "column": e})
    return {"checked": len(specs), "failures": failures, "passed": not failures}
