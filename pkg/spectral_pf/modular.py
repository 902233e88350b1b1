"""
Theta constants, the modular lambda function and related q-expansions.

Nome convention: q = exp(i pi tau). Every expansion related to the energy
level eps uses the half-nome s = q^(1/2) as its series variable.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple
import logging
import math

from spectral_pf.elliptic import (
    dos_value,
    dos_value_hypergeometric,
    dos_value_landen,
    ellip_K,
    epsilon_to_modulus,
    landen,
    nome,
)
from spectral_pf.exactseries import ExactSeries
from spectral_pf.ratfun import RationalFunction
from spectral_pf.schema import DOSParams, DOSReport

logger = logging.getLogger(__name__)

NOME_VARIABLE = "q"
HALF_NOME_VARIABLE = "s"


def _theta_base(which: int, order: int, variable: str) -> ExactSeries:
    if which == 3:
        terms = {0: 1}
        n = 1
        while n * n <= order:
            terms[n * n] = 2
            n += 1
    elif which == 4:
        terms = {0: 1}
        n = 1
        while n * n <= order:
            terms[n * n] = 2 * (-1) ** n
            n += 1
    elif which == 2:
        # theta2 / (2 q^(1/4)) = sum_{n>=0} q^(n(n+1))
        terms = {}
        n = 0
        while n * (n + 1) <= order:
            terms[n * (n + 1)] = 1
            n += 1
    else:
        raise ValueError(f"theta index must be 2, 3 or 4, got {which}")
    return ExactSeries.from_dict(terms, variable, order)


def theta_fourth(which: int, order: int, nome_var: str = NOME_VARIABLE) -> ExactSeries:
    """
    Fourth power of a Jacobi theta constant as an exact integer q-series.

    theta2^4 = 16 q (sum_{n>=0} q^(n(n+1)))^4 after extracting the q^(1/4)
    prefactor, so all three series are integral.

    Raises:
        ValueError: If order < 1 or which is not 2, 3 or 4
    """
    if order < 1:
        raise ValueError(f"theta expansions need order >= 1, got {order}")
    base = _theta_base(which, order, nome_var)
    fourth = base ** 4
    if which == 2:
        fourth = (fourth * 16).shift(1).truncate(order)
    return fourth


def lambda_qexp(order: int, nome_var: str = NOME_VARIABLE) -> ExactSeries:
    """lambda = theta2^4 / theta3^4 = 16q - 128q^2 + 704q^3 - ..."""
    return theta_fourth(2, order, nome_var) / theta_fourth(3, order, nome_var)


def complementary_lambda_qexp(order: int, nome_var: str = NOME_VARIABLE) -> ExactSeries:
    """1 - lambda = theta4^4 / theta3^4."""
    return theta_fourth(4, order, nome_var) / theta_fourth(3, order, nome_var)


def epsilon_sq_qexp(order: int) -> ExactSeries:
    """
    eps^2 as a series in the half-nome s.

    Halving tau turns lambda(tau) into 1 - eps^2, which on nomes replaces q
    by s = q^(1/2); the result is 1 - lambda with q renamed to s.
    """
    if order < 2:
        raise ValueError(f"epsilon_sq_qexp needs order >= 2, got {order}")
    return (1 - lambda_qexp(order)).rename(HALF_NOME_VARIABLE)


def j_lambda_function(variable: str = "lam") -> RationalFunction:
    """256 (1 - lambda + lambda^2)^3 / (lambda^2 (1 - lambda)^2)."""
    return RationalFunction.from_expr(
        f"256*(1 - {variable} + {variable}**2)**3/({variable}**2*(1 - {variable})**2)", variable
    )


def j_epsilon_function(variable: str = "epsilon") -> RationalFunction:
    """256 (eps^4 - eps^2 + 1)^3 / (eps^4 (eps^2 - 1)^2)."""
    e = variable
    return RationalFunction.from_expr(f"256*({e}**4 - {e}**2 + 1)**3/({e}**4*({e}**2 - 1)**2)", e)


def j_doubled_epsilon_function(variable: str = "epsilon") -> RationalFunction:
    """16 (eps^4 - 16 eps^2 + 16)^3 / (eps^8 (1 - eps^2))."""
    e = variable
    return RationalFunction.from_expr(f"16*({e}**4 - 16*{e}**2 + 16)**3/({e}**8*(1 - {e}**2))", e)


def j_from_hauptmodul(order: int, nome_var: str = NOME_VARIABLE) -> ExactSeries:
    """
    j as a Laurent series in q = exp(i pi tau).

    The classical nome for j is q^2 = exp(2 pi i tau), so only even powers
    appear: j = q^-2 + 744 + 196884 q^2 + ...
    """
    if order < 1:
        raise ValueError(f"j expansion needs order >= 1, got {order}")
    lam = lambda_qexp(order + 3, nome_var)
    one_minus = 1 - lam
    numerator = (1 - lam + lam * lam) ** 3 * 256
    denominator = lam * lam * one_minus * one_minus
    return (numerator / denominator).truncate(order)


def j_of_lambda(lam: complex) -> complex:
    return 256 * (1 - lam + lam * lam) ** 3 / (lam * lam * (1 - lam) ** 2)


# ----------------------------------------------------------------------
# Numeric theta constants

def theta_value(which: int, q: float) -> float:
    """Numeric theta2, theta3 or theta4 at a real nome 0 <= q < 1."""
    if not 0 <= q < 1:
        raise ValueError(f"nome must lie in [0, 1), got {q}")
    if which == 3 or which == 4:
        sign = -1.0 if which == 4 else 1.0
        total, n = 1.0, 1
        while True:
            term = q ** (n * n)
            if term < 1e-18:
                return total
            total += 2.0 * sign ** n * term
            n += 1
    if which == 2:
        if q == 0:
            return 0.0
        total, n = 0.0, 0
        while True:
            term = q ** (n * (n + 1))
            if term < 1e-18:
                return 2.0 * q ** 0.25 * total
            total += term
            n += 1
    raise ValueError(f"theta index must be 2, 3 or 4, got {which}")


def lambda_value(q: float) -> float:
    """Numeric lambda = theta2^4/theta3^4 at a real nome."""
    return (theta_value(2, q) / theta_value(3, q)) ** 4


def weight_one_residual(k: float) -> float:
    """K(k1) - (pi/2) theta3(q1)^2 for the ascended modulus k1 and its nome q1."""
    k1 = landen(k, "ascend")
    q1 = nome(k1)
    return ellip_K(k1) - math.pi / 2.0 * theta_value(3, q1) ** 2


def j_second_relation(q: float, order: int = 40) -> Tuple[float, float]:
    """
    Both sides of the doubled-argument j relation at a real nome q.

    The left side is ``j_epsilon_function`` at eps with eps^2 read from the
    half-nome series at s = sqrt(q); the right side is
    ``j_doubled_epsilon_function`` at eps with eps^2 read at s = q.
    Both equal j at the halved period ratio.
    """
    if not 0 < q < 1:
        raise ValueError(f"nome must lie in (0, 1), got {q}")
    eps_sq = epsilon_sq_qexp(order)
    eps_half = math.sqrt(eps_sq.evaluate(math.sqrt(q)))
    eps_full = math.sqrt(eps_sq.evaluate(q))
    lhs = j_epsilon_function().evaluate(eps_half)
    rhs = j_doubled_epsilon_function().evaluate(eps_full)
    return lhs, rhs


# ----------------------------------------------------------------------
# Lambert series for the density of states

@dataclass(frozen=True)
class LambertSum:
    value: float
    tail_bound: float
    terms: int


def lambert_dos(q1: float, a: int, b: int, terms: Optional[int] = None) -> LambertSum:
    """
    (1/(2 pi^2 a b)) [pi/2 + 2 pi sum_{n>=1} q1^n / (1 + q1^(2n))], truncated.

    Without ``terms`` the sum runs until q1^n drops below 1e-17. The reported
    tail bound is the geometric majorant of the dropped terms.
    """
    if not 0 <= q1 < 1:
        raise ValueError(f"q1 must lie in [0, 1), got {q1}")
    if terms is None:
        terms = max(1, math.ceil(math.log(1e-17) / math.log(q1))) if q1 > 0 else 1
    if terms < 1:
        raise ValueError(f"terms must be positive, got {terms}")
    prefactor = 1.0 / (2.0 * math.pi ** 2 * a * b)
    total = sum(q1 ** n / (1.0 + q1 ** (2 * n)) for n in range(1, terms + 1))
    tail = prefactor * 2.0 * math.pi * q1 ** (terms + 1) / (1.0 - q1)
    return LambertSum(prefactor * (math.pi / 2.0 + 2.0 * math.pi * total), tail, terms)


def lambert_dos_nome(q: float, a: int, b: int, terms: int = 200) -> float:
    """Equivalent form (1/(4 pi a b)) [1 + 4 sum q^(n/2)/(1 + q^n)] with q = q1^2."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    root = math.sqrt(q)
    total = sum(root ** n / (1.0 + q ** n) for n in range(1, terms + 1))
    return (1.0 + 4.0 * total) / (4.0 * math.pi * a * b)


def lambert_coefficient_series(order: int) -> ExactSeries:
    """theta3(s)^2 = 1 + 4 sum s^n/(1 + s^(2n)) as an exact series in s."""
    terms = {0: Fraction(1)}
    for n in range(1, order + 1):
        # s^n/(1 + s^(2n)) = sum_j (-1)^j s^(n(2j+1))
        j = 0
        while n * (2 * j + 1) <= order:
            exponent = n * (2 * j + 1)
            terms[exponent] = terms.get(exponent, Fraction(0)) + 4 * (-1) ** j
            j += 1
    return ExactSeries.from_dict(terms, HALF_NOME_VARIABLE, order)


def dos_report(params: DOSParams) -> DOSReport:
    """
    Density of states by the direct form, the Landen form and the Lambert series.

    The Lambert series runs in the nome q1 of the ascended modulus
    k1 = sqrt(1 - eps^2); eps = 1 gives k1 = 0 and q1 = 0.

    Raises:
        ValueError: If eps lies outside (0, 1]
    """
    k = epsilon_to_modulus(params.epsilon)
    k1 = landen(k, "ascend") if k > 0 else 0.0
    q1 = nome(k1) if k1 > 0 else 0.0
    lambert = lambert_dos(q1, params.a, params.b)
    values = [dos_value(params), dos_value_landen(params), lambert.value,
              dos_value_hypergeometric(params)]
    deviation = max(abs(x - y) for x in values for y in values)
    logger.debug(f"DOS at eps={params.epsilon}: values {values}, q1={q1}")
    return DOSReport(
        epsilon=params.epsilon,
        a=params.a,
        b=params.b,
        modulus=k,
        direct=values[0],
        landen=values[1],
        hypergeometric=values[3],
        lambert=values[2],
        lambert_tail_bound=lambert.tail_bound,
        max_deviation=deviation,
    )
