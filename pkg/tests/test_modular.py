"""
Tests for theta constants, lambda, j and the Lambert-series density of states.
"""

import math
from fractions import Fraction

import pytest

from spectral_pf.elliptic import dos_value, nome
from spectral_pf.modular import (
    complementary_lambda_qexp,
    dos_report,
    epsilon_sq_qexp,
    j_doubled_epsilon_function,
    j_epsilon_function,
    j_from_hauptmodul,
    j_lambda_function,
    j_of_lambda,
    j_second_relation,
    lambda_qexp,
    lambda_value,
    lambert_coefficient_series,
    lambert_dos,
    lambert_dos_nome,
    theta_fourth,
    theta_value,
    weight_one_residual,
)
from spectral_pf.ratfun import RationalFunction
from spectral_pf.schema import DOSParams


def test_theta_fourth_powers():
    """Test the integer q-expansions of theta2^4, theta3^4 and theta4^4."""
    assert theta_fourth(3, 5).dense(0, 5) == [1, 8, 24, 32, 24, 48]
    assert theta_fourth(4, 5).dense(0, 5) == [1, -8, 24, -32, 24, -48]
    assert theta_fourth(2, 5).dense(0, 5) == [0, 16, 0, 64, 0, 96]


def test_jacobi_identity():
    """Test theta3^4 = theta2^4 + theta4^4 to high order."""
    order = 40
    assert theta_fourth(3, order) == theta_fourth(2, order) + theta_fourth(4, order)


def test_theta_fourth_validation():
    """Test bad theta indices and orders."""
    with pytest.raises(ValueError, match="theta index"):
        theta_fourth(5, 4)
    with pytest.raises(ValueError, match="order"):
        theta_fourth(3, 0)


def test_lambda_expansion():
    """Test lambda = 16q - 128q^2 + 704q^3 - 3072q^4 + 11488q^5 - 38400q^6."""
    lam = lambda_qexp(6)
    assert lam.dense(0, 6) == [0, 16, -128, 704, -3072, 11488, -38400]
    assert lam + complementary_lambda_qexp(6) == 1


def test_epsilon_squared_in_half_nome():
    """Test eps^2 = 1 - lambda with q renamed to s."""
    eps_sq = epsilon_sq_qexp(5)
    assert eps_sq.variable == "s"
    assert eps_sq.dense(0, 5) == [1, -16, 128, -704, 3072, -11488]
    with pytest.raises(ValueError):
        epsilon_sq_qexp(1)


def test_j_expansion():
    """Test j = q^-2 + 744 + 196884 q^2 + 21493760 q^4."""
    j = j_from_hauptmodul(4)
    assert j.valuation == -2
    assert j.dense(-2, 4) == [1, 0, 744, 0, 196884, 0, 21493760]


def test_j_at_square_lattice():
    """Test j(lambda = 1/2) = 1728."""
    assert j_of_lambda(0.5) == pytest.approx(1728.0)
    assert j_lambda_function().evaluate(Fraction(1, 2)) == 1728


def test_j_in_epsilon_is_j_at_one_minus_eps_squared():
    """Test j(lambda) at lambda = 1 - eps^2 gives the eps form."""
    lam = RationalFunction.from_expr("1 - epsilon**2", "epsilon")
    assert j_lambda_function().substitute(lam) == j_epsilon_function()


def test_j_doubled_epsilon_function_at_square_lattice():
    """Test the doubled-argument form against its expression at eps^2 = 1/2."""
    form = j_doubled_epsilon_function()
    eps = math.sqrt(0.5)
    # 16 (1/4 - 8 + 16)^3 / ((1/16)(1/2))
    assert form.evaluate(eps) == pytest.approx(16 * 8.25 ** 3 * 32)


@pytest.mark.parametrize("q", [0.01, 0.03, 0.05])
def test_j_doubled_argument_relation(q):
    """Test both sides of the doubled-argument relation agree numerically."""
    lhs, rhs = j_second_relation(q)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_j_second_relation_validates_nome():
    """Test q outside (0, 1) is refused."""
    with pytest.raises(ValueError, match="nome"):
        j_second_relation(0.0)


@pytest.mark.parametrize("q", [0.05, 0.2, 0.4])
def test_numeric_jacobi_identity(q):
    """Test theta3^4 = theta2^4 + theta4^4 numerically."""
    assert theta_value(3, q) ** 4 == pytest.approx(theta_value(2, q) ** 4 + theta_value(4, q) ** 4,
                                                   rel=1e-13)


@pytest.mark.parametrize("k", [0.2, 0.5, 0.9])
def test_lambda_of_nome_is_k_squared(k):
    """Test lambda(q(k)) = k^2."""
    assert lambda_value(nome(k)) == pytest.approx(k * k, rel=1e-12)


def test_theta_value_validation():
    """Test nomes outside [0, 1)."""
    with pytest.raises(ValueError):
        theta_value(3, 1.0)
    assert theta_value(2, 0.0) == 0.0


@pytest.mark.parametrize("k", [0.1, 0.3, 0.6])
def test_weight_one_form(k):
    """Test K(k1) = (pi/2) theta3(q1)^2."""
    assert abs(weight_one_residual(k)) < 1e-12


def test_lambert_coefficients_are_theta3_squared():
    """Test 1 + 4 sum s^n/(1 + s^2n) = theta3^2."""
    order = 30
    theta3_sq = theta_fourth(3, order).sqrt().rename("s")
    assert lambert_coefficient_series(order) == theta3_sq
    # r2(n): number of representations as a sum of two squares
    assert lambert_coefficient_series(10).dense() == [1, 4, 4, 0, 4, 8, 0, 0, 4, 4, 8]


def test_lambert_dos_forms_agree():
    """Test the q1 and q = q1^2 forms of the Lambert sum."""
    q1 = 0.3
    assert lambert_dos(q1, 2, 3).value == pytest.approx(lambert_dos_nome(q1 * q1, 2, 3), rel=1e-13)


def test_lambert_dos_at_band_edge():
    """Test q1 = 0 reduces to 1/(4 pi a b)."""
    result = lambert_dos(0.0, 2, 3)
    assert result.value == pytest.approx(1 / (24 * math.pi))
    assert result.tail_bound == 0.0


def test_lambert_tail_bound_shrinks_with_terms():
    """Test truncating early reports a larger tail bound."""
    short = lambert_dos(0.5, 2, 3, terms=5)
    full = lambert_dos(0.5, 2, 3)
    assert short.tail_bound > full.tail_bound
    assert abs(short.value - full.value) <= short.tail_bound
    with pytest.raises(ValueError):
        lambert_dos(1.0, 2, 3)


@pytest.mark.parametrize("epsilon", [0.1, 0.5, 0.9, 1.0])
def test_dos_report_agreement(epsilon):
    """Test all four DOS evaluations agree."""
    report = dos_report(DOSParams(epsilon=epsilon, a=2, b=3))
    assert report.direct == pytest.approx(dos_value(DOSParams(epsilon=epsilon, a=2, b=3)))
    assert report.max_deviation < 1e-12
    assert report.modulus == pytest.approx((1 - epsilon) / (1 + epsilon))
