"""
Mirror map of the density-of-states equation and the Q-expansion of the energy level.

Q(k) = exp(D2/D1) = k exp(g/D1) where D2 = D1 ln k + g. Inverting Q(k) and
composing with eps = (1 - k)/(1 + k) gives eps(Q); substituting Q = 4s with
s = q^(1/2) ties it to the theta-function expansion of eps^2.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Optional, Tuple
import logging

from pydantic import BaseModel

from spectral_pf.exactseries import ExactSeries, LogPair, schwarzian_of_derivative, schwarzian_of_logpair
from spectral_pf.ode import (
    LinearODE2,
    dos_equation,
    epsilon_equation,
    frobenius_solutions,
    schwarzian_rhs,
)
from spectral_pf.schema import InstantonTable
from spectral_pf.utils import format_fraction, lambert_coefficients

logger = logging.getLogger(__name__)

MIN_MIRROR_ORDER = 8
MIN_CROSSCHECK_ORDER = 12

# eps(Q) coefficients as published; the Q^6 entry disagrees with the computed series.
PRINTED_EPSILON_COEFFICIENTS: Dict[int, Fraction] = {
    0: Fraction(1),
    1: Fraction(-2),
    2: Fraction(2),
    3: Fraction(-3, 2),
    4: Fraction(1),
    5: Fraction(-39, 64),
    6: Fraction(11, 64),
}

# 1 - 8 * sum c_n (Q/4)^n, the rescaled form of the same expansion.
RESCALED_EPSILON_COEFFICIENTS = [1, -4, 12, -32, 78]


@dataclass(frozen=True)
class MirrorData:
    """Every series of the mirror-map pipeline at one truncation order."""

    d1: ExactSeries
    d2: LogPair
    t_prime: ExactSeries
    q_of_k: ExactSeries
    k_of_q: ExactSeries
    eps_of_q: ExactSeries

    @property
    def order(self) -> int:
        return self.q_of_k.order


def epsilon_of_k(order: int, variable: str = "k") -> ExactSeries:
    """(1 - k)/(1 + k) = 1 + 2 sum_{n>=1} (-1)^n k^n."""
    terms = {0: 1}
    terms.update({n: 2 * (-1) ** n for n in range(1, order + 1)})
    return ExactSeries.from_dict(terms, variable, order)


def build_mirror(order: int) -> MirrorData:
    """
    Run the mirror-map pipeline on the density-of-states equation.

    Args:
        order: Truncation order, at least 8

    Returns:
        MirrorData with D1, D2, t', Q(k), k(Q) and eps(Q)

    Raises:
        ValueError: If order < 8
    """
    if order < MIN_MIRROR_ORDER:
        raise ValueError(f"mirror map needs order >= {MIN_MIRROR_ORDER}, got {order}")
    d1, d2 = frobenius_solutions(dos_equation(), order)
    ratio = d2.analytic_part / d1
    q_of_k = ratio.exp().shift(1).truncate(order)
    k_of_q = q_of_k.reverse().rename("Q")
    eps_of_q = epsilon_of_k(order).compose(k_of_q)
    t_prime = ratio.derivative() + ExactSeries.monomial(-1, "k", ratio.order - 1)
    logger.info(f"Mirror map built to order {order}")
    return MirrorData(d1, d2, t_prime, q_of_k, k_of_q, eps_of_q)


def epsilon_of_sqrtq(order: int, mirror: Optional[MirrorData] = None) -> ExactSeries:
    """eps as a series in s = q^(1/2), from eps(Q) with Q = 4s."""
    if order < 4:
        raise ValueError(f"epsilon_of_sqrtq needs order >= 4, got {order}")
    if mirror is None:
        mirror = build_mirror(max(order, MIN_MIRROR_ORDER))
    return mirror.eps_of_q.scale_variable(4, "s").truncate(order)


def instanton_numbers(eps_series: ExactSeries, d_max: int) -> InstantonTable:
    """
    Integers n_d with eps = 1 + sum_d n_d s^d / (1 - s^d).

    The coefficient of s^N is sum_{d | N} n_d, so n_d follows by Moebius
    inversion over the divisors of d.

    Raises:
        ValueError: If the constant term is not 1 or d_max exceeds the series order
        ArithmeticError: If some n_d is not an integer
    """
    if eps_series.coefficient(0) != 1:
        raise ValueError(f"expected constant term 1, got {eps_series.coefficient(0)}")
    if not 1 <= d_max <= eps_series.order:
        raise ValueError(f"d_max must lie in [1, {eps_series.order}], got {d_max}")
    coefficients = {n: eps_series.coefficient(n) for n in range(1, d_max + 1)}
    numbers = {}
    for d, value in lambert_coefficients(coefficients, d_max).items():
        if value.denominator != 1:
            raise ArithmeticError(f"instanton number n_{d} = {format_fraction(value)} is not an integer")
        numbers[d] = value.numerator
    return InstantonTable(d_max=d_max, numbers=numbers)


# ----------------------------------------------------------------------
# Cross-checks

class SchwarzianReport(BaseModel):
    equation: str
    order: int
    laurent_order: int
    agreement_order: int

    @property
    def agrees(self) -> bool:
        return self.agreement_order >= self.laurent_order


def schwarzian_crosscheck(order: int, ode: Optional[LinearODE2] = None,
                          perturbation: Optional[ExactSeries] = None) -> SchwarzianReport:
    """
    Compare {t, x} of t = D2/D1 with the Laurent expansion of 2Q.

    ``perturbation`` is added to the analytic part of D2 as a negative control.
    """
    if order < MIN_CROSSCHECK_ORDER:
        raise ValueError(f"Schwarzian cross-check needs order >= {MIN_CROSSCHECK_ORDER}, got {order}")
    ode = ode or dos_equation()
    d1, d2 = frobenius_solutions(ode, order)
    analytic = d2.analytic_part
    if perturbation is not None:
        analytic = analytic + perturbation
    ratio = analytic / d1
    t_prime = ratio.derivative() + ExactSeries.monomial(-1, ode.variable, ratio.order - 1)
    series_side = schwarzian_of_logpair(t_prime)
    rhs = schwarzian_rhs(ode).to_series(series_side.order)
    agreement = series_side.agrees_with(rhs)
    logger.debug(f"Schwarzian of {ode.name} agrees through x^{agreement} of x^{series_side.order}")
    return SchwarzianReport(equation=ode.name or ode.variable, order=order,
                            laurent_order=series_side.order, agreement_order=agreement)


def epsilon_schwarzian_rhs(order: int, mirror: Optional[MirrorData] = None) -> SchwarzianReport:
    """
    Check {eps, t} = -(d eps/dt)^2 (1 + eps^2)^2 / (2 eps^2 (1 - eps^2)^2) through eps(Q).

    With t = ln Q the left side is Q^2 {eps, Q} - 1/2 and d eps/dt = Q d eps/dQ.
    """
    mirror = mirror or build_mirror(order)
    eps = mirror.eps_of_q
    eps_prime = eps.derivative()
    q_sq = ExactSeries.monomial(2, "Q", eps.order)
    lhs = q_sq * schwarzian_of_derivative(eps_prime) - Fraction(1, 2)
    eps_t = eps_prime.shift(1)
    rhs = -(eps_t * eps_t) * schwarzian_rhs(epsilon_equation()).evaluate_series(eps)
    laurent_order = min(lhs.order, rhs.order)
    return SchwarzianReport(equation="epsilon", order=order, laurent_order=laurent_order,
                            agreement_order=lhs.agrees_with(rhs))


def frobenius_closed_form(n: int) -> Tuple[Fraction, Fraction]:
    """(d_n, c_n) from d_{2m} = d_{2m+1} = (C(2m, m)/4^m)^2 and c_{2m} = c_{2m+1} = 2 d_{2m} sum_{i=1..m} 1/(m+i)."""
    if n < 0:
        raise ValueError(f"index must be nonnegative, got {n}")
    m = n // 2
    d = Fraction(comb(2 * m, m), 4 ** m) ** 2
    c = 2 * d * sum((Fraction(1, m + i) for i in range(1, m + 1)), Fraction(0))
    return d, c


def printed_epsilon_coefficients() -> Dict[int, Fraction]:
    return dict(PRINTED_EPSILON_COEFFICIENTS)


def rescaled_epsilon_series(order: int = 5) -> ExactSeries:
    """1 - 8 sum_{n=1..5} c_n (Q/4)^n with the printed c_n."""
    terms = {0: Fraction(1)}
    for n, c in enumerate(RESCALED_EPSILON_COEFFICIENTS, start=1):
        if n <= order:
            terms[n] = -8 * Fraction(c, 4 ** n)
    return ExactSeries.from_dict(terms, "Q", min(order, len(RESCALED_EPSILON_COEFFICIENTS)))


class CoefficientComparison(BaseModel):
    exponent: int
    computed: str
    printed: str
    agrees: bool


def compare_printed_coefficient(mirror: MirrorData, exponent: int = 6) -> CoefficientComparison:
    """Computed eps(Q) coefficient against the printed one; a mismatch is logged as a warning."""
    computed = mirror.eps_of_q.coefficient(exponent)
    printed = PRINTED_EPSILON_COEFFICIENTS[exponent]
    agrees = computed == printed
    if not agrees:
        logger.warning(
            f"eps(Q) coefficient of Q^{exponent}: computed {format_fraction(computed)}, "
            f"printed {format_fraction(printed)}"
        )
    return CoefficientComparison(exponent=exponent, computed=format_fraction(computed),
                                 printed=format_fraction(printed), agrees=agrees)
