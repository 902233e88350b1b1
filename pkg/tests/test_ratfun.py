"""
Tests for exact rational functions.
"""

import pytest
from fractions import Fraction

from spectral_pf.ratfun import RationalFunction, ratfun_equal


def test_canonical_form_cancels_common_factors():
    """Test that gcds are removed and the denominator made monic."""
    f = RationalFunction.from_expr("(2*x**2 - 2)/(4*x - 4)", "x")
    assert f.numerator_coefficients() == [Fraction(1, 2), Fraction(1, 2)]
    assert f.denominator_coefficients() == [1]
    assert f == RationalFunction.from_coefficients([1, 1], [2], "x")


def test_from_expr_rejects_non_rational():
    """Test parsing of something that is not rational in x."""
    with pytest.raises(ValueError, match="Not a rational function"):
        RationalFunction.from_expr("sqrt(x)", "x")


def test_arithmetic_and_equality():
    """Test field operations and cross-multiplication equality."""
    x = RationalFunction.identity("k")
    f = 1 / (1 - x)
    g = x / (1 - x)
    assert f - g == 1
    assert (f * (1 - x)) == RationalFunction.constant(1, "k")
    assert ratfun_equal(f ** 2, 1 / ((1 - x) * (1 - x)))
    assert hash(f - g) == hash(RationalFunction.constant(1, "k"))


def test_division_by_zero_function_raises():
    """Test dividing by the zero function."""
    x = RationalFunction.identity("x")
    with pytest.raises(ValueError, match="zero rational function"):
        x / (x - x)


def test_mobius_rejects_degenerate_map():
    """Test ad - bc = 0 is refused."""
    with pytest.raises(ValueError, match="degenerate"):
        RationalFunction.mobius(1, 2, 2, 4, "t")


def test_derivative_and_substitute():
    """Test d/dx of 1/(1 - x^2) and substitution of a Moebius map."""
    f = RationalFunction.from_expr("1/(1 - x**2)", "x")
    assert f.derivative() == RationalFunction.from_expr("2*x/(1 - x**2)**2", "x")

    k_of_eps = RationalFunction.mobius(-1, 1, 1, 1, "epsilon")
    one_minus_k = RationalFunction.from_expr("1 - x", "x").substitute(k_of_eps)
    assert one_minus_k.variable == "epsilon"
    assert one_minus_k == RationalFunction.from_expr("2*epsilon/(1 + epsilon)", "epsilon")


def test_evaluate_exact_and_pole():
    """Test exact evaluation and pole detection."""
    f = RationalFunction.from_expr("(1 + x)/(1 - x)", "x")
    assert f.evaluate(Fraction(1, 3)) == 2
    assert f.evaluate(0.5) == pytest.approx(3.0)
    with pytest.raises(ValueError, match="pole"):
        f.evaluate(1)


def test_valuation_at_zero():
    """Test orders of zeros and poles at 0."""
    assert RationalFunction.from_expr("x**3/(1 + x)", "x").valuation_at_zero() == 3
    assert RationalFunction.from_expr("1/(x**2*(1 - x))", "x").valuation_at_zero() == -2


def test_laurent_expansion():
    """Test to_series on a function with a double pole."""
    f = RationalFunction.from_expr("1/(x**2*(1 - x))", "x")
    series = f.to_series(3)
    assert series.valuation == -2
    assert series.dense(-2, 3) == [1, 1, 1, 1, 1, 1]


def test_evaluate_series_with_nonzero_constant():
    """Test f(s) for a series with s(0) != 0."""
    from spectral_pf.exactseries import ExactSeries

    f = RationalFunction.from_expr("1/(1 + x)", "x")
    s = ExactSeries.from_coefficients([1, 1], "t", order=4)
    result = f.evaluate_series(s)
    # 1/(2 + t) = 1/2 - t/4 + t^2/8 - ...
    assert result.dense(0, 3) == [Fraction(1, 2), Fraction(-1, 4), Fraction(1, 8), Fraction(-1, 16)]


def test_rename_keeps_coefficients():
    """Test renaming the variable."""
    f = RationalFunction.from_expr("(1 + x)/(2 - x)", "x")
    g = f.rename("y")
    assert g.variable == "y"
    assert g.numerator_coefficients() == f.numerator_coefficients()
    assert not ratfun_equal(f, g)
