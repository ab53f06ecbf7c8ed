"""The 48 x 48 exact character table with Schur orthogonality and
multiplicity decomposition of coefficient class functions.

The table ships as a plain-text data file (one row per character, entries as
"a:b:d" for a + b*i*sqrt(d)) and is validated on load: no two rows may be
identical, the trivial character must be the all-ones row, and the exact
Schur orthogonality check is available as the integrity gate.
"""

from __future__ import annotations

import math
from fractions import Fraction
from importlib import resources

from .numerics import QuadIm

Rat = Fraction


def _parse_entry(tok: str) -> QuadIm:
    a, b, d = tok.split(":")
    return QuadIm(Fraction(a), Fraction(b), int(d))


class CharacterTable:
    """Ordered class labels, class orders, and the exact character matrix."""

    def __init__(self, classes, orders, chars):
        self.classes = list(classes)
        self.class_orders = dict(zip(self.classes, orders))
        self.chars = [list(row) for row in chars]
        self._index = {c: i for i, c in enumerate(self.classes)}
        self._validate()
        self._centralizers = {c: self._centralizer(c) for c in self.classes}
        self.group_order = self._centralizers[self.classes[0]]

    # -- loading -------------------------------------------------------------
    @staticmethod
    def load() -> "CharacterTable":
        text = resources.files("thseries.data").joinpath("character_table.txt").read_text()
        classes = orders = None
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, *toks = line.split()
            if key == "classes":
                classes = toks
            elif key == "orders":
                orders = [int(t) for t in toks]
            else:
                rows.append([_parse_entry(t) for t in toks])
        if classes is None or orders is None or len(rows) != len(classes):
            raise ValueError("malformed character table file")
        return CharacterTable(classes, orders, rows)

    def _validate(self):
        n = len(self.classes)
        if any(len(r) != n for r in self.chars):
            raise ValueError("character matrix is not square")
        if any(x != QuadIm.from_rat(1) for x in self.chars[0]):
            raise ValueError("first row must be the trivial character")
        seen = set()
        for i, row in enumerate(self.chars):
            key = tuple(row)
            if key in seen:
                raise ValueError(f"duplicate character row at index {i + 1}")
            seen.add(key)

    # -- queries -------------------------------------------------------------
    def value(self, char_index: int, class_label: str) -> QuadIm:
        """chi_(char_index) at the class (1-based character index)."""
        return self.chars[char_index - 1][self._index[class_label]]

    def _centralizer(self, class_label: str) -> int:
        j = self._index[class_label]
        total = sum((row[j].norm() for row in self.chars), Fraction(0))
        if total.denominator != 1:
            raise ValueError(f"non-integral centralizer order at {class_label}")
        return int(total)

    def centralizer_order(self, class_label: str) -> int:
        return self._centralizers[class_label]

    def class_size(self, class_label: str) -> int:
        return self.group_order // self._centralizers[class_label]

    def _integer_data(self):
        """(2*re, 2*im, column radicands) as integer matrices, cached.

        Entries are doubled to clear the half-integer denominators; the
        radicand is constant down any column.
        """
        if getattr(self, "_intdata", None) is not None:
            return self._intdata
        n = len(self.classes)
        re = [[0] * n for _ in range(n)]
        im = [[0] * n for _ in range(n)]
        rad = [0] * n
        for i in range(n):
            for g in range(n):
                x = self.chars[i][g]
                ta, tb = 2 * x.a, 2 * x.b
                if ta.denominator != 1 or tb.denominator != 1:
                    raise ValueError("character value is not a half-integer combination")
                re[i][g], im[i][g] = int(ta), int(tb)
                if x.b != 0:
                    if rad[g] and rad[g] != x.d:
                        raise ValueError(f"mixed radicands in column {self.classes[g]}")
                    rad[g] = x.d
        self._intdata = (re, im, rad)
        return self._intdata

    # -- verification --------------------------------------------------------
    def schur_check(self) -> dict:
        """First orthogonality over all 48 x 48 character pairs, exact.

        Entries are doubled to clear the half-integer denominators, so each
        pair reduces to integer dot products (real and radical parts handled
        separately; the radicand is constant down any column).
        """
        n = len(self.classes)
        sizes = [self.class_size(c) for c in self.classes]
        re, im, rad = self._integer_data()
        failures = []
        for i in range(n):
            ai, bi = re[i], im[i]
            for j in range(i, n):
                aj, bj = re[j], im[j]
                s_re = sum(w * (ai[g] * aj[g] + rad[g] * bi[g] * bj[g])
                           for g, w in enumerate(sizes))
                s_im = sum(w * (bi[g] * aj[g] - ai[g] * bj[g])
                           for g, w in enumerate(sizes))
                expected = 4 * self.group_order if i == j else 0
                if s_re != expected or s_im != 0:
                    failures.append((i + 1, j + 1, Fraction(s_re, 4), Fraction(s_im, 4)))
        return {"pairs_checked": n * (n + 1) // 2, "failures": failures,
                "passed": not failures}

    def column_orthogonality_check(self, g: str, h: str) -> QuadIm:
        """sum_j chi_j(g) * conj(chi_j(h)); 0 for distinct classes."""
        a, b = self._index[g], self._index[h]
        acc = QuadIm.from_rat(0)
        for row in self.chars:
            acc = acc + row[a] * row[b].conj()
        return acc

    def decompose(self, omega: dict, n: int):
        """Multiplicities m_j with (-1)^n * omega(g) = sum_j m_j chi_j(g)."""
        missing = [c for c in self.classes if c not in omega]
        if missing:
            raise ValueError(f"omega undefined on classes {missing}")
        sign = (-1) ** n
        vals = [Fraction(omega[c]) for c in self.classes]
        scale = math.lcm(*(v.denominator for v in vals))
        o = [int(v * scale) for v in vals]
        w = [self.class_size(c) for c in self.classes]
        re, im, rad = self._integer_data()
        wo = [w[g] * o[g] for g in range(len(o))]
        mults = []
        for j in range(len(self.chars)):
            rj, ij = re[j], im[j]
            # conj(chi) flips the radical part; each radicand must cancel
            imag = {}
            for g, x in enumerate(wo):
                if ij[g] and x:
                    imag[rad[g]] = imag.get(rad[g], 0) - x * ij[g]
            if any(imag.values()):
                raise ValueError("non-rational multiplicity; omega is not a class function")
            s = sum(x * rj[g] for g, x in enumerate(wo) if rj[g])
            mults.append(Fraction(sign * s, 2 * self.group_order * scale))
        return MultiplicityVector(n, mults)


class MultiplicityVector:
    """Exponent n together with the 48 rational multiplicities."""

    def __init__(self, n: int, values):
        self.n = n
        self.values = list(values)

    def __getitem__(self, j: int) -> Fraction:
        """1-based character index."""
        return self.values[j - 1]

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.values)

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    def __eq__(self, other):
        return isinstance(other, MultiplicityVector) and self.values == other.values

    def __repr__(self):
        nz = {j + 1: v for j, v in enumerate(self.values) if v != 0}
        return f"MultiplicityVector(n={self.n}, nonzero={nz})"


def centralizer_order(class_label: str) -> int:
    return _default_table().centralizer_order(class_label)


def schur_check() -> dict:
    return _default_table().schur_check()


def decompose(omega: dict, n: int) -> MultiplicityVector:
    return _default_table().decompose(omega, n)


_TABLE = None


def _default_table() -> CharacterTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = CharacterTable.load()
    return _TABLE
