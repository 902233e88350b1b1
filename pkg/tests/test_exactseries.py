"""
Tests for exact truncated series.
"""

import random

import pytest
from fractions import Fraction

from spectral_pf.exactseries import (
    ExactSeries,
    LogPair,
    schwarzian_of_derivative,
    schwarzian_of_logpair,
    series_arith,
    series_compose,
    series_reverse,
    series_transcendental,
)


def x_series(order=10):
    return ExactSeries.monomial(1, "x", order)


def test_leading_zeros_are_stripped():
    """Test that stored coefficients start at the true valuation."""
    s = ExactSeries.from_coefficients([0, 0, 3, 1], "x", order=5)
    assert s.valuation == 2
    assert s.coefficient(0) == 0
    assert s.coefficient(2) == 3
    assert s.coefficient(5) == 0

    zero = ExactSeries.zero("x", 4)
    assert zero.is_zero()
    assert zero.valuation == 5


def test_coefficient_beyond_order_raises():
    """Test that unknown coefficients are never read."""
    s = ExactSeries.geometric(2, "x", 3)
    assert s.dense() == [1, 2, 4, 8]
    with pytest.raises(ValueError, match="beyond truncation order"):
        s.coefficient(4)


def test_variable_mismatch_raises():
    """Test arithmetic between series in different variables."""
    with pytest.raises(ValueError, match="variable mismatch"):
        ExactSeries.one("x", 3) + ExactSeries.one("y", 3)


def test_order_is_minimum_of_operands():
    """Test that mixing orders keeps the tighter truncation."""
    a = ExactSeries.geometric(1, "x", 8)
    b = ExactSeries.geometric(1, "x", 5)
    assert (a + b).order == 5
    assert (a * b).order == 5
    assert (a * b).dense() == [1, 2, 3, 4, 5, 6]


def test_product_with_valuation_gains_order():
    """Test x^2 * f knows two more coefficients than f."""
    f = ExactSeries.geometric(1, "x", 4)
    product = ExactSeries.monomial(2, "x", 10) * f
    assert product.order == 6
    assert product.dense(0, 6) == [0, 0, 1, 1, 1, 1, 1]


def test_inverse_of_laurent_series():
    """Test division producing a negative valuation."""
    x = x_series(10)
    inverse = 1 / (x + x ** 2)
    assert inverse.valuation == -1
    assert inverse.coefficient(-1) == 1
    assert inverse.coefficient(0) == -1
    assert inverse.coefficient(1) == 1


def test_division_by_zero_series_raises():
    """Test that an identically-zero divisor is rejected."""
    with pytest.raises(ValueError, match="identically-zero"):
        ExactSeries.one("x", 3) / ExactSeries.zero("x", 3)


def test_power_and_sqrt():
    """Test sqrt inverts squaring for f(0) = 1."""
    f = 1 + x_series(12) * 3 - x_series(12) ** 2
    assert (f ** 2).sqrt() == f
    assert (f ** -1) * f == ExactSeries.one("x", 12)


def test_exp_log_round_trip():
    """Test log(exp(f)) = f and exp of x gives 1/n!."""
    x = x_series(8)
    e = x.exp()
    assert e.coefficient(3) == Fraction(1, 6)
    assert e.coefficient(5) == Fraction(1, 120)
    assert e.log() == x
    with pytest.raises(ValueError, match="f\\(0\\) = 1"):
        (1 + x).shift(1).log()


def test_compose_needs_zero_constant_term():
    """Test that the inner series of a composition vanishes at 0."""
    f = ExactSeries.geometric(1, "x", 5)
    with pytest.raises(ValueError, match="constant term"):
        f.compose(1 + x_series(5))


def test_compose_geometric_series():
    """Test 1/(1-y) at y = 2x gives powers of 2."""
    f = ExactSeries.geometric(1, "y", 6)
    result = f.compose(x_series(6) * 2)
    assert result.variable == "x"
    assert result.dense() == [2 ** n for n in range(7)]


def test_reverse_round_trip():
    """Test that reversion composes to the identity in both orders."""
    x = x_series(15)
    f = x + x ** 2 / 2 - x ** 3 * Fraction(1, 3) + x ** 7
    g = f.reverse()
    assert f.compose(g) == x
    assert g.compose(f) == x


def test_reverse_of_log_series_is_expm1():
    """Test reversion of log(1 + x) gives exp(x) - 1."""
    x = x_series(10)
    log1p = (1 + x).log()
    assert log1p.reverse() == x.exp() - 1


def test_reverse_requires_linear_term():
    """Test reversion rejects f'(0) = 0."""
    with pytest.raises(ValueError, match="nonzero linear term"):
        (x_series(6) ** 2).reverse()


def test_integral_rejects_residue():
    """Test integrating a 1/x term is refused."""
    with pytest.raises(ValueError, match="x\\^-1"):
        ExactSeries.monomial(-1, "x", 4).integral()


def test_scale_and_shift():
    """Test f(4x) and multiplication by a monomial."""
    f = ExactSeries.from_coefficients([1, 1, 1], "Q", order=2)
    scaled = f.scale_variable(4, "s")
    assert scaled.variable == "s"
    assert scaled.dense() == [1, 4, 16]
    assert f.shift(-1).valuation == -1


def test_equality_compares_on_overlap():
    """Test that equality ignores coefficients beyond the shorter order."""
    long = ExactSeries.geometric(1, "x", 10)
    short = ExactSeries.geometric(1, "x", 4)
    assert long == short
    assert not long.identical(short)
    assert long != ExactSeries.geometric(2, "x", 4)


def test_agrees_with_reports_first_mismatch():
    """Test the agreement exponent of two series."""
    a = ExactSeries.from_coefficients([1, 2, 3, 4], "x")
    b = ExactSeries.from_coefficients([1, 2, 5, 4], "x")
    assert a.agrees_with(b) == 1
    assert a.agrees_with(a) == 3


def test_string_form():
    """Test the human-readable rendering."""
    s = ExactSeries.from_coefficients([1, -1, Fraction(1, 4)], "k")
    assert str(s) == "1 - k + 1/4*k^2 + O(k^3)"


def test_module_level_helpers():
    """Test the functional wrappers."""
    a = ExactSeries.geometric(1, "x", 5)
    b = ExactSeries.one("x", 5)
    assert series_arith(a, b, "sub").coefficient(0) == 0
    assert series_arith(a, b, "div") == a
    assert series_compose(a, x_series(5)) == a
    assert series_reverse(x_series(5)) == x_series(5)
    assert series_transcendental(x_series(5), "exp").coefficient(2) == Fraction(1, 2)


def test_logpair_derivative():
    """Test (f ln x + g)' = f' ln x + f/x + g'."""
    f = ExactSeries.one("x", 6)
    pair = LogPair(f, ExactSeries.zero("x", 6))
    derivative = pair.derivative()
    assert derivative.log_part.is_zero()
    assert derivative.analytic_part.coefficient(-1) == 1


def test_schwarzian_of_mobius_map_vanishes():
    """Test {f, x} = 0 for f = x/(1 - x)."""
    x = x_series(12)
    f = x / (1 - x)
    assert schwarzian_of_derivative(f.derivative()).is_zero()


def test_schwarzian_of_logpair_checks_residue():
    """Test that t' must start with 1/x."""
    with pytest.raises(ValueError, match="valuation"):
        schwarzian_of_logpair(ExactSeries.one("x", 6))
    t_prime = ExactSeries.monomial(-1, "x", 6)
    # {ln x, x} = 1/(2 x^2)
    result = schwarzian_of_logpair(t_prime)
    assert result.valuation == -2
    assert result.coefficient(-2) == Fraction(1, 2)


def test_sqrt_of_epsilon_squared_series():
    """Test sqrt(1 - 16s + 128s^2 - ...) = 1 - 8s + 32s^2 - ..."""
    eps_sq = ExactSeries.from_coefficients([1, -16, 128, -704, 3072, -11488], "s")
    root = eps_sq.sqrt()
    assert root.dense() == [1, -8, 32, -96, 256, -624]
    assert root ** 2 == eps_sq


def test_schwarzian_inversion_formula():
    """Test {w, v} = -(dw/dv)^2 {v, w}(w) for w = v + v^3."""
    w = ExactSeries.from_coefficients([0, 1, 0, 1], "v", order=14)
    w_prime = w.derivative()
    lhs = schwarzian_of_derivative(w_prime)

    inverse = w.reverse()
    inverse_schwarzian = schwarzian_of_derivative(inverse.derivative())
    rhs = -(w_prime * w_prime) * inverse_schwarzian.compose(w)

    assert lhs.order >= 10
    assert lhs.agrees_with(rhs) >= 10
    assert lhs == rhs
    assert lhs.dense(0, 4) == [6, 0, -72, 0, 378]


def random_series(rng, order, valuation=0):
    coefficients = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(order + 1)]
    for i in range(valuation):
        coefficients[i] = Fraction(0)
    if valuation < len(coefficients) and coefficients[valuation] == 0:
        coefficients[valuation] = Fraction(1)
    return ExactSeries.from_coefficients(coefficients, "x", order=order)


def test_arithmetic_is_associative_and_commutative():
    """Test products and sums of random series do not depend on evaluation order."""
    rng = random.Random(2024)
    for _ in range(20):
        a, b, c = (random_series(rng, 8) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c


def test_reverse_is_two_sided_inverse_on_random_series():
    """Test reverse(f) o f = f o reverse(f) = x for 50 random f with f(0) = 0, f'(0) != 0."""
    rng = random.Random(7)
    order = 8
    x = ExactSeries.monomial(1, "x", order)
    for _ in range(50):
        f = random_series(rng, order, valuation=1)
        g = f.reverse()
        assert f.compose(g) == x
        assert g.compose(f) == x
