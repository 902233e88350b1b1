"""
Tests for the mirror map, eps(Q) and the instanton numbers.
"""

from fractions import Fraction

import pytest

from spectral_pf.exactseries import ExactSeries
from spectral_pf.mirrormap import (
    PRINTED_EPSILON_COEFFICIENTS,
    build_mirror,
    compare_printed_coefficient,
    epsilon_of_k,
    epsilon_of_sqrtq,
    epsilon_schwarzian_rhs,
    frobenius_closed_form,
    instanton_numbers,
    rescaled_epsilon_series,
    schwarzian_crosscheck,
)
from spectral_pf.modular import epsilon_sq_qexp


def test_q_of_k(mirror):
    """Test Q(k) = k + k^3/4 + 17k^5/128 + 45k^7/512."""
    assert mirror.q_of_k.dense(0, 8) == [0, 1, 0, Fraction(1, 4), 0, Fraction(17, 128), 0,
                                         Fraction(45, 512), 0]


def test_k_of_q(mirror):
    """Test k(Q) = Q - Q^3/4 + 7Q^5/128 - 5Q^7/512."""
    assert mirror.k_of_q.variable == "Q"
    assert mirror.k_of_q.dense(0, 7) == [0, 1, 0, Fraction(-1, 4), 0, Fraction(7, 128), 0,
                                         Fraction(-5, 512)]


def test_mirror_round_trip(mirror):
    """Test Q(k(Q)) = Q through the full order."""
    identity = ExactSeries.monomial(1, "Q", mirror.order)
    assert mirror.q_of_k.compose(mirror.k_of_q) == identity


def test_build_mirror_minimum_order():
    """Test orders below 8 are refused."""
    with pytest.raises(ValueError, match="order >= 8"):
        build_mirror(7)


def test_epsilon_of_k():
    """Test (1 - k)/(1 + k) = 1 - 2k + 2k^2 - ..."""
    assert epsilon_of_k(4).dense() == [1, -2, 2, -2, 2]


def test_epsilon_of_q_low_coefficients(mirror):
    """Test eps(Q) through Q^5 against the printed coefficients."""
    for n in range(6):
        assert mirror.eps_of_q.coefficient(n) == PRINTED_EPSILON_COEFFICIENTS[n]


def test_epsilon_q6_coefficient_differs_from_printed(mirror):
    """Test the Q^6 coefficient is 11/32, twice the printed 11/64."""
    assert mirror.eps_of_q.coefficient(6) == Fraction(11, 32)
    comparison = compare_printed_coefficient(mirror, 6)
    assert not comparison.agrees
    assert comparison.computed == "11/32"
    assert comparison.printed == "11/64"


def test_rescaled_form_matches(mirror):
    """Test 1 - 8 sum c_n (Q/4)^n equals eps(Q) through Q^5."""
    assert rescaled_epsilon_series() == mirror.eps_of_q
    assert rescaled_epsilon_series().order == 5


def test_epsilon_in_half_nome(mirror):
    """Test eps(s) = 1 - 8s + 32s^2 - 96s^3 + 256s^4 - 624s^5 + 1408s^6."""
    eps = epsilon_of_sqrtq(6, mirror)
    assert eps.variable == "s"
    assert eps.dense() == [1, -8, 32, -96, 256, -624, 1408]


def test_epsilon_squared_is_one_minus_lambda(mirror):
    """Test the mirror-map eps(s)^2 agrees with the theta expansion."""
    eps = epsilon_of_sqrtq(30, mirror)
    assert eps * eps == epsilon_sq_qexp(30)


def test_epsilon_of_sqrtq_validates_order():
    """Test tiny orders are refused."""
    with pytest.raises(ValueError):
        epsilon_of_sqrtq(3)


def test_instanton_numbers(mirror):
    """Test n1 = -8, n2 = 40, n3 = -88."""
    table = instanton_numbers(epsilon_of_sqrtq(20, mirror), 20)
    assert table.d_max == 20
    assert table.numbers[1] == -8
    assert table.numbers[2] == 40
    assert table.numbers[3] == -88
    assert all(isinstance(value, int) for value in table.numbers.values())


def test_instanton_numbers_validation():
    """Test constant term, range and integrality checks."""
    eps = ExactSeries.from_coefficients([1, Fraction(1, 2), 0], "s", order=2)
    with pytest.raises(ArithmeticError, match="not an integer"):
        instanton_numbers(eps, 2)
    with pytest.raises(ValueError, match="d_max"):
        instanton_numbers(eps, 3)
    with pytest.raises(ValueError, match="constant term"):
        instanton_numbers(ExactSeries.from_coefficients([2, 1], "s"), 1)


@pytest.mark.parametrize("n", range(0, 16))
def test_frobenius_closed_form(mirror, n):
    """Test d_n and c_n against the computed D1 and analytic part of D2."""
    d, c = frobenius_closed_form(n)
    assert mirror.d1.coefficient(n) == d
    assert mirror.d2.analytic_part.coefficient(n) == c


def test_frobenius_closed_form_rejects_negative():
    """Test negative indices."""
    with pytest.raises(ValueError):
        frobenius_closed_form(-1)


def test_schwarzian_crosscheck():
    """Test {t, k} = 2Q and that a perturbed D2 fails."""
    report = schwarzian_crosscheck(14)
    assert report.agrees
    assert report.equation == "dos"

    perturbed = schwarzian_crosscheck(14, perturbation=ExactSeries.monomial(3, "k", 14))
    assert not perturbed.agrees

    with pytest.raises(ValueError, match="order >= 12"):
        schwarzian_crosscheck(10)


def test_epsilon_schwarzian_equation(mirror):
    """Test the Schwarzian equation for eps(t)."""
    report = epsilon_schwarzian_rhs(mirror.order, mirror)
    assert report.agrees
