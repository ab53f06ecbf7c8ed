"""Truncated Rademacher coefficients and assembled series."""

import math
from fractions import Fraction

import pytest

from thseries.kloosterman import MultiplierParams
from thseries.rademacher import (CLASS_RECORDS, CoeffEstimate, TruncationConfig,
                                 UnconvergedError, bessel_I_half, class_record,
                                 coefficient_A, coefficient_A_f64, delta_odd,
                                 series_F, series_Z, theta_coefficient,
                                 zeta_truncated, _folded_index)


def test_records_cover_48_classes_with_39_series():
    assert len(CLASS_RECORDS) == 39
    merged = [m for r in CLASS_RECORDS for m in r.merged_labels]
    assert len(merged) == 48
    assert len(set(merged)) == 48


def test_class_record_lookup():
    assert class_record("12A") is class_record("12B")
    assert class_record("12AB").label == "12AB"
    assert class_record("1A").order == 1
    with pytest.raises(KeyError):
        class_record("50Z")


def test_delta_odd():
    assert [delta_odd(k) for k in range(5)] == [0, 1, 0, 1, 0]


def test_bessel_half_matches_closed_form():
    for x in (0.1, 1.0, 3.7):
        want = math.sqrt(2 / (math.pi * x)) * math.sinh(x)
        assert abs(float(bessel_I_half(x, 96)) - want) < 1e-13
    with pytest.raises(ValueError):
        bessel_I_half(0, 96)


def test_theta_coefficient():
    assert theta_coefficient(1, 0) == 1
    assert [theta_coefficient(1, n) for n in (1, 2, 3, 4, 9, 10)] == [2, 0, 0, 2, 2, 0]
    assert theta_coefficient(3, 9) == 2
    assert theta_coefficient(3, 3) == 0
    assert theta_coefficient(2, 16) == 2
    assert theta_coefficient(2, 8) == 0


def test_folded_index_trivial_multiplier():
    p = MultiplierParams(13, 0, 1)
    assert _folded_index(p, 5, 7) == 5


def test_folded_index_shifts_by_multiplier():
    p = class_record("3A").params        # (N, v, h) = (3, 1, 3)
    # shift = 4*3*v_hat*c^2 / h_hat with h_hat = 3, v_hat = 4
    assert _folded_index(p, 0, 1) == 16
    assert _folded_index(p, 1, 2) == 1 + 64


def test_coefficient_A_rejects_bad_exponents():
    p = MultiplierParams(2, 0, 1)
    for n in (-1, 2, 3, 6, 7):
        with pytest.raises(ValueError):
            coefficient_A(p, n)


def test_coeff_estimate_rejects_large_distance():
    with pytest.raises(ValueError):
        CoeffEstimate(value=0.7, imag_residue=0.0, c_max=10, rounded=1,
                      distance_to_integer=Fraction(7, 10))


def test_mpc_and_f64_paths_agree():
    cfg = TruncationConfig(c_max=60, precision=128)
    for label, n in (("2A", 0), ("3A", 1), ("7A", 4)):
        p = class_record(label).params
        est = coefficient_A(p, n, cfg)
        v64, im64 = coefficient_A_f64(p, n, 60)
        assert abs(float(est.value) - v64) < 1e-10
        assert float(est.imag_residue) < 1e-10 and im64 < 1e-10


def test_integer_oracles_at_moderate_truncation():
    cfg = TruncationConfig(c_max=1000, precision=96)
    cases = {("2A", 0): -4, ("3A", 0): 1, ("4A", 0): 0}
    for (label, n), want in cases.items():
        est = coefficient_A(class_record(label).params, n, cfg)
        assert est.rounded == want
        assert float(est.distance_to_integer) < 0.05


def test_series_Z_structure():
    cfg = TruncationConfig(c_max=400, precision=96)
    ests = {}
    z = series_Z(class_record("2A").params, 5, cfg, estimates=ests)
    assert z.coefficient(-3) == 1
    assert sorted(ests) == [0, 1, 4, 5]
    assert all(e.denominator == 1 for e in z.support())
    assert all(int(e) in (-3, 0, 1, 4, 5) for e in z.support())


def test_series_F_assembles_theta_corrections():
    cfg = TruncationConfig(c_max=1000, precision=96)
    f = series_F(class_record("3A"), 0, cfg, threshold=Fraction(1, 10))
    assert f.coefficient(-3) == 2
    assert f.coefficient(0) == 14        # 2*1 + (-6 + 18)
    g = series_F(class_record("4A"), 0, cfg)
    assert g.coefficient(0) == 8


def test_series_F_flags_unconverged():
    cfg = TruncationConfig(c_max=50, precision=96)
    with pytest.raises(UnconvergedError) as err:
        series_F(class_record("2A"), 4, cfg, threshold=Fraction(1, 10 ** 6))
    assert err.value.label == "2A"
    assert err.value.offenders


def test_zeta_truncated_matches_coefficient_normalization():
    # at s = 3/4 the n = 0 zeta sum carries the same Kloosterman data as A(0)
    p = class_record("2A").params
    z = zeta_truncated(p, -3, 0, Fraction(3, 4), TruncationConfig(c_max=40))
    assert abs(float(z.imag)) < 1e-12
