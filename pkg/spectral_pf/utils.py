"""Utility functions for logging, exact-number formatting and divisor helpers."""

import logging
import math
import sys
from fractions import Fraction
from typing import Dict, List, Union


def setup_logging(log_level: str = "INFO") -> None:
    """Configure application logging.

    Records go to stderr so command output on stdout stays reproducible.
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)]
    )


def format_fraction(value: Fraction) -> str:
    """Serialize a rational as an exact ``num/den`` string (integers without ``/1``)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: Union[str, int, Fraction]) -> Fraction:
    """Parse an exact ``num/den`` or integer string.

    Raises:
        ValueError: If the text is not an exact rational (decimals are refused)
    """
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    cleaned = text.strip()
    if not cleaned or "." in cleaned or "e" in cleaned.lower():
        raise ValueError(f"Not an exact rational: {text!r}")
    return Fraction(cleaned)


def divisors(n: int) -> List[int]:
    """Positive divisors of ``n`` in increasing order."""
    if n < 1:
        raise ValueError(f"divisors() needs a positive integer, got {n}")
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    large = [n // d for d in reversed(small) if d * d != n]
    return small + large


def mobius(n: int) -> int:
    """Moebius function mu(n)."""
    if n < 1:
        raise ValueError(f"mobius() needs a positive integer, got {n}")
    result = 1
    remaining = n
    p = 2
    while p * p <= remaining:
        if remaining % p == 0:
            remaining //= p
            if remaining % p == 0:
                return 0
            result = -result
        p += 1
    if remaining > 1:
        result = -result
    return result


def lambert_coefficients(series_coefficients: Dict[int, Fraction], d_max: int) -> Dict[int, Fraction]:
    """Invert a_N = sum_{d | N} n_d by Moebius summation over divisors."""
    return {
        d: sum(
            (mobius(d // e) * Fraction(series_coefficients.get(e, 0)) for e in divisors(d)),
            Fraction(0),
        )
        for d in range(1, d_max + 1)
    }
