"""Coefficient matrices, relation/congruence data, and exact linear algebra."""

from fractions import Fraction

import pytest

from thseries.pipeline import (CongruenceSpec, CoeffMatrix, SERIES_LABELS,
                               THETA_LABELS, _invert, _rank, _rank_mod_p,
                               _row_space_solver, load_congruences,
                               load_relations)


def test_series_labels():
    assert len(SERIES_LABELS) == 39
    assert SERIES_LABELS[0] == "1A"
    assert len(THETA_LABELS) == 5


def test_load_relations_reference_known_rows():
    rels = load_relations()
    assert len(rels) == 5
    known = set(SERIES_LABELS) | set(THETA_LABELS)
    for rel in rels:
        assert len(rel) >= 2
        for lbl, c in rel:
            assert lbl in known
            assert isinstance(c, Fraction) and c != 0


def test_load_congruences_reference_known_rows():
    specs = load_congruences()
    assert len(specs) > 40
    known = set(SERIES_LABELS) | set(THETA_LABELS)
    for spec in specs:
        assert spec.modulus > 1
        assert spec.prime in (2, 3, 5, 7, 13, 19, 31)
        assert spec.prime ** spec.exponent == spec.modulus
        for lbl, c in spec.terms:
            assert lbl in known and c != 0


def test_congruence_spec_prime_power():
    assert CongruenceSpec((("1A", 1),), 59049).prime == 3
    assert CongruenceSpec((("1A", 1),), 59049).exponent == 10
    with pytest.raises(ValueError):
        CongruenceSpec((("1A", 1),), 12).prime


def test_rank_and_inverse():
    assert _rank([[1, 2], [2, 4], [0, 1]]) == 2
    assert _rank_mod_p([[1, 2], [3, 6]], 5) == 1
    assert _rank_mod_p([[1, 2], [3, 2]], 5) == 2
    inv = _invert([[2, 0], [1, 1]])
    assert inv == [[Fraction(1, 2), 0], [Fraction(-1, 2), 1]]
    with pytest.raises(ValueError):
        _invert([[1, 2], [2, 4]])


def test_row_space_solver():
    basis = [[1, 0, 2], [0, 1, 3]]
    solve = _row_space_solver(basis)
    assert solve([2, 1, 7]) == [Fraction(2), Fraction(1)]
    assert solve([0, 0, 1]) is None
    with pytest.raises(ValueError):
        _row_space_solver([[1, 2], [2, 4]])


def test_coeff_matrix_requires_leading_entry():
    rows = {lbl: {-3: 2, 0: 1} for lbl in SERIES_LABELS}
    cm = CoeffMatrix.from_coefficients(rows)
    assert cm.exponents == [-3, 0]
    assert cm.row("th1") == [0, 1]
    assert cm.row("th4") == [0, 1]
    assert cm.expanded_row("12A") == cm.row("12AB")
    assert len(cm.expanded_labels) == 53
    bad = dict(rows)
    bad["2A"] = {-3: 1, 0: 1}
    with pytest.raises(ValueError):
        CoeffMatrix.from_coefficients(bad)
