"""
Tests for payload models and exact-number helpers.
"""

import pytest
from fractions import Fraction
from pydantic import ValidationError

from spectral_pf.exactseries import ExactSeries
from spectral_pf.ode import dos_equation
from spectral_pf.schema import (
    ComplexValue,
    SeriesPayload,
    ode_to_payload,
    payload_to_series,
    series_to_payload,
)
from spectral_pf.utils import divisors, format_fraction, lambert_coefficients, mobius, parse_fraction


def test_format_and_parse_fraction():
    """Test exact num/den strings."""
    assert format_fraction(Fraction(-39, 64)) == "-39/64"
    assert format_fraction(Fraction(4, 2)) == "2"
    assert parse_fraction(" 17/128 ") == Fraction(17, 128)
    assert parse_fraction(3) == 3

    # Decimals are not exact
    with pytest.raises(ValueError, match="exact rational"):
        parse_fraction("0.25")
    with pytest.raises(ValueError):
        parse_fraction("1e3")
    with pytest.raises(ValueError):
        parse_fraction("")


def test_divisors_and_mobius():
    """Test divisor lists and the Moebius function."""
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(1) == [1]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    with pytest.raises(ValueError):
        divisors(0)


def test_lambert_coefficients_inverts_divisor_sum():
    """Test a_N = sum_{d | N} n_d is inverted."""
    numbers = {1: 3, 2: -1, 3: 5, 4: 2, 5: 0, 6: 7}
    sums = {N: sum(numbers[d] for d in divisors(N)) for N in numbers}
    assert lambert_coefficients(sums, 6) == numbers


def test_series_payload_power_series():
    """Test power series are listed from exponent 0."""
    series = ExactSeries.from_coefficients([0, 1, 0, Fraction(1, 4)], "k", order=4)
    payload = series_to_payload(series)
    assert payload.valuation == 0
    assert payload.coefficients == ["0", "1", "0", "1/4", "0"]
    assert payload_to_series(payload) == series


def test_series_payload_laurent_series():
    """Test Laurent series start at their valuation."""
    series = ExactSeries.from_dict({-2: 1, 0: 744}, "q", 1)
    payload = series_to_payload(series)
    assert payload.valuation == -2
    assert payload.coefficients == ["1", "0", "744", "0"]


def test_series_payload_validation():
    """Test wrong lengths and inexact coefficients are rejected."""
    with pytest.raises(ValidationError, match="expected 3 coefficients"):
        SeriesPayload(variable="x", valuation=0, order=2, coefficients=["1", "2"])
    with pytest.raises(ValidationError):
        SeriesPayload(variable="x", valuation=0, order=1, coefficients=["1", "0.5"])


def test_ode_payload():
    """Test the DOS equation serializes its coefficient lists."""
    payload = ode_to_payload(dos_equation())
    assert payload.variable == "k"
    # Monic denominator k^3 - k flips the numerator sign
    assert payload.p.num == ["-1", "2", "1"]
    assert payload.p.den == ["0", "-1", "0", "1"]


def test_complex_value():
    """Test the complex number wrapper."""
    value = ComplexValue.of(1 - 2j)
    assert (value.re, value.im) == (1.0, -2.0)
