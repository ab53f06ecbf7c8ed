"""Half-integral-weight Kloosterman sums and their factored evaluation."""

import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from thseries.kloosterman import (MultiplierParams, epsilon, kloosterman_factored,
                                  kloosterman_factored_f64, kloosterman_sum,
                                  kronecker, psi_value, salie_sum,
                                  vanishing_predicate)


def as_complex(z):
    return complex(float(z.real), float(z.imag))


def test_epsilon_values():
    assert epsilon(1) == 1
    assert epsilon(5) == 1
    assert epsilon(3) == 1j
    assert epsilon(7) == 1j
    with pytest.raises(ValueError):
        epsilon(4)


def test_kronecker_matches_legendre():
    # squares mod 7 are {1, 2, 4}
    assert [kronecker(a, 7) for a in range(1, 7)] == [1, 1, -1, 1, -1, -1]
    assert kronecker(14, 7) == 0


def test_multiplier_params_validation():
    p = MultiplierParams(12, 7, 12)
    assert p.h_hat == 3 and p.v_hat == 7
    assert not p.is_trivial()
    assert MultiplierParams(13, 0, 1).is_trivial()
    with pytest.raises(ValueError):
        MultiplierParams(5, 1, 8)      # 8 does not divide gcd(20, 96)


def test_psi_is_a_root_of_unity():
    p = MultiplierParams(3, 1, 3)
    z = as_complex(psi_value(p, 24, 5))
    assert abs(abs(z) - 1) < 1e-12
    # 1 * 24 * 5 / (3 * 3) = 40/3, so the phase is exp(2*pi*i/3)
    assert abs(z - cmath.exp(2j * cmath.pi / 3)) < 1e-12


def test_base_oracle():
    # K(-3, 0, 4) = sum over d in {1, 3}: (4/d) eps_d e(-3 dbar/4)
    val = as_complex(kloosterman_sum(-3, 0, 4))
    assert abs(val - (1 + 1j)) < 1e-12


def test_vanishing_for_16_divides_c():
    for c in (16, 32, 48, 64, 80):
        for m, n in ((0, 1), (1, 2), (2, 5), (3, 6), (1, 11)):
            if (m - n) % 4 == 0:
                continue
            assert vanishing_predicate(m, n, c)
            assert abs(as_complex(kloosterman_sum(m, n, c))) < 1e-9 * c


def test_vanishing_for_8_exactly_same_parity():
    for c in (8, 24, 40):
        for m, n in ((1, 3), (0, 2), (2, 4), (1, 7)):
            assert (m - n) % 4 != 0 and (m - n) % 2 == 0
            assert abs(as_complex(kloosterman_sum(m, n, c))) < 1e-9 * c


def test_vanishing_hypothesis_has_counterexample():
    # c = 8 with m, n of opposite parity: the sum does not vanish
    assert vanishing_predicate(0, 1, 8)
    val = as_complex(kloosterman_sum(0, 1, 8))
    assert abs(val - 2 * cmath.sqrt(2) * (1 + 1j)) < 1e-9


@given(st.integers(1, 64), st.integers(-6, 12), st.integers(-6, 12))
@settings(max_examples=60, deadline=None)
def test_factored_matches_direct(k, m, n):
    c = 4 * k
    direct = as_complex(kloosterman_sum(m, n, c))
    fact = as_complex(kloosterman_factored(m, n, c))
    assert abs(direct - fact) < 1e-10 * max(1.0, abs(direct))


@given(st.integers(1, 40), st.integers(-6, 12), st.integers(-6, 12))
@settings(max_examples=60, deadline=None)
def test_factored_f64_matches_mpc(k, m, n):
    c = 4 * k
    a = as_complex(kloosterman_factored(m, n, c))
    b = kloosterman_factored_f64(m, n, c)
    assert abs(a - b) < 1e-8 * max(1.0, abs(a))


def _salie_direct(a, b, c):
    total = 0j
    for d in range(1, c):
        if math.gcd(d, c) != 1:
            continue
        k = kronecker(d, c)
        if k == 0:
            continue
        dbar = pow(d, -1, c)
        total += k * cmath.exp(2j * cmath.pi * ((a * dbar + b * d) % c) / c)
    return total


@given(st.integers(0, 30), st.integers(0, 30),
       st.sampled_from([3, 5, 7, 9, 13, 15, 21, 25, 27, 35, 45, 49]))
@settings(max_examples=80, deadline=None)
def test_salie_closed_form_matches_direct(a, b, c):
    closed = salie_sum(a, b, c)
    direct = _salie_direct(a, b, c)
    assert abs(closed - direct) < 1e-8 * max(1.0, abs(direct))


def test_multiplier_folds_into_shifted_index():
    from thseries.rademacher import _folded_index
    p = MultiplierParams(3, 1, 3)
    for c in (1, 2, 3, 5):
        n = 4
        shifted = _folded_index(p, n, c)
        with_psi = as_complex(kloosterman_sum(-3, n, 4 * p.N * c, params=p))
        folded = as_complex(kloosterman_sum(-3, shifted, 4 * p.N * c))
        assert abs(with_psi - folded) < 1e-9 * max(1.0, abs(folded))
