"""Exact character-table queries and orthogonality checks."""

from fractions import Fraction

import pytest

from thseries.chartable import (CharacterTable, MultiplicityVector,
                                centralizer_order, decompose, schur_check)
from thseries.numerics import QuadIm

GROUP_ORDER = 90745943887872000


@pytest.fixture(scope="module")
def table():
    return CharacterTable.load()


def test_shape_and_group_order(table):
    assert len(table.classes) == 48
    assert table.classes[0] == "1A"
    assert table.group_order == GROUP_ORDER
    assert centralizer_order("1A") == GROUP_ORDER


def test_degrees_are_positive_integers(table):
    degrees = [table.value(j, "1A") for j in range(1, 49)]
    assert degrees[0] == QuadIm.from_rat(1)
    assert degrees[1] == QuadIm.from_rat(248)
    for x in degrees:
        assert x.is_rational()
        assert x.as_rat().denominator == 1
        assert x.as_rat() > 0


def test_centralizer_divides_group_order(table):
    for c in table.classes:
        assert GROUP_ORDER % table.centralizer_order(c) == 0
        assert table.class_size(c) * table.centralizer_order(c) == GROUP_ORDER


def test_schur_orthogonality_passes():
    report = schur_check()
    assert report["passed"]
    assert report["pairs_checked"] == 48 * 49 // 2
    assert report["failures"] == []


def test_column_orthogonality(table):
    z = table.column_orthogonality_check("2A", "3A")
    assert not z
    same = table.column_orthogonality_check("2A", "2A")
    assert same.is_rational()
    assert same.as_rat() == table.centralizer_order("2A")


def test_decompose_trivial_character(table):
    omega = {c: int((table.value(1, c)).as_rat()) for c in table.classes}
    m = decompose(omega, 0)
    assert isinstance(m, MultiplicityVector)
    assert m.is_integral() and m.is_nonnegative()
    assert m[1] == 1
    assert all(m[j] == 0 for j in range(2, 49))


def test_decompose_sign_convention(table):
    omega = {c: int((table.value(2, c)).as_rat()) for c in table.classes}
    even = decompose(omega, 0)
    odd = decompose(omega, 1)
    assert even[2] == 1
    assert odd[2] == -1


def test_decompose_rejects_partial_input(table):
    with pytest.raises(ValueError):
        decompose({"1A": 1}, 0)


def test_decompose_non_class_function_is_fractional(table):
    omega = {c: 0 for c in table.classes}
    omega["2A"] = 1
    m = table.decompose(omega, 0)
    assert not m.is_integral()
