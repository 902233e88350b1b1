"""
Second-order linear ODEs y'' + p*y' + r*y = 0 with rational-function coefficients.

Covers the indicial equation at 0, Frobenius solutions in the double-root
(maximally unipotent) case, residual checking, the Q-form, Theta-operator
form and changes of variable.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union
import logging

import sympy

from spectral_pf.exactseries import ExactSeries, LogPair
from spectral_pf.ratfun import RationalFunction

logger = logging.getLogger(__name__)

MIN_RESIDUAL_ORDER = 5


@dataclass(frozen=True)
class LinearODE2:
    """y'' + p(x) y' + r(x) y = 0."""

    p: RationalFunction
    r: RationalFunction
    variable: str
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for label, coefficient in (("p", self.p), ("r", self.r)):
            if coefficient.variable != self.variable:
                raise ValueError(
                    f"coefficient {label} is in {coefficient.variable!r}, ODE is in {self.variable!r}"
                )

    @classmethod
    def from_exprs(cls, p, r, variable: str, name: str = "") -> "LinearODE2":
        return cls(RationalFunction.from_expr(p, variable),
                   RationalFunction.from_expr(r, variable), variable, name)

    def coefficient_series(self, order: int) -> Tuple[ExactSeries, ExactSeries]:
        """Laurent expansions of p and r at 0 through x^order."""
        return self.p.to_series(order), self.r.to_series(order)

    def __str__(self):
        label = f"{self.name}: " if self.name else ""
        return f"{label}y'' + ({self.p})*y' + ({self.r})*y = 0"


@dataclass(frozen=True)
class ThetaForm:
    """theta2*Theta^2 + theta1*Theta + theta0 with Theta = x d/dx."""

    theta2: RationalFunction
    theta1: RationalFunction
    theta0: RationalFunction
    variable: str

    def normalized(self) -> "ThetaForm":
        """Divide through so the Theta^2 coefficient is 1."""
        lead = self.theta2
        one = RationalFunction.constant(1, self.variable)
        return ThetaForm(one, self.theta1 / lead, self.theta0 / lead, self.variable)

    def __str__(self):
        return f"({self.theta2})*T^2 + ({self.theta1})*T + ({self.theta0})"


@dataclass(frozen=True)
class IndicialEquation:
    """rho^2 + (P1(0) - 1) rho + P2(0) and its roots with multiplicity."""

    coefficients: Tuple[Fraction, Fraction, Fraction]
    roots: Dict[str, int]

    @property
    def is_double_zero(self) -> bool:
        return self.roots == {"0": 2}

    def __str__(self):
        c0, c1, _ = self.coefficients
        return f"rho^2 + ({c1})*rho + ({c0})"


# ----------------------------------------------------------------------
# Named equations

def dos_equation() -> LinearODE2:
    """Picard-Fuchs equation satisfied by the density of states D(k)."""
    return LinearODE2.from_exprs("(1 - 2*k - k**2)/(k*(1 - k**2))", "-1/(k*(1 + k)**2)", "k",
                                 name="dos")


def quarter_period_equation() -> LinearODE2:
    """k(1-k^2) K'' + (1-3k^2) K' - k K = 0, satisfied by K(k) and K(k')."""
    return LinearODE2.from_exprs("(1 - 3*k**2)/(k*(1 - k**2))", "-1/(1 - k**2)", "k",
                                 name="quarter-period")


def legendre_equation() -> LinearODE2:
    """Picard-Fuchs equation of the Legendre family y^2 = x(x-1)(x-lambda)."""
    return LinearODE2.from_exprs("(1 - 2*lam)/(lam*(1 - lam))", "-1/(4*lam*(1 - lam))", "lam",
                                 name="legendre")


def epsilon_equation() -> LinearODE2:
    """eps(1-eps^2) D'' + (1-3eps^2) D' - eps D = 0."""
    return LinearODE2.from_exprs("(1 - 3*epsilon**2)/(epsilon*(1 - epsilon**2))",
                                 "-1/(1 - epsilon**2)", "epsilon", name="epsilon")


def euler_equation(variable: str = "x") -> LinearODE2:
    """y'' + y'/x = 0, solved by 1 and ln x."""
    return LinearODE2.from_exprs(f"1/{variable}", "0", variable, name="euler")


def epsilon_theta_form() -> ThetaForm:
    """theta^2 - eps^2 (theta + 1)^2 expanded in powers of theta."""
    eps_sq = RationalFunction.from_expr("epsilon**2", "epsilon")
    return ThetaForm(1 - eps_sq, -2 * eps_sq, -eps_sq, "epsilon")


# ----------------------------------------------------------------------
# Local analysis

def _value_at_zero(function: RationalFunction, label: str) -> Fraction:
    try:
        return function.evaluate(Fraction(0))
    except ValueError as e:
        raise ValueError(f"x = 0 is an irregular singular point ({label} has a pole): {e}") from e


def indicial_equation(ode: LinearODE2, at: int = 0) -> IndicialEquation:
    """
    Indicial equation of ``ode`` at x = 0.

    Args:
        ode: Equation to analyse
        at: Expansion point; only 0 is supported

    Returns:
        IndicialEquation with exact coefficients and roots keyed by their string form

    Raises:
        ValueError: If the point is not 0 or 0 is an irregular singular point
    """
    if at != 0:
        raise ValueError(f"indicial equations are only computed at 0, not {at}")
    x = RationalFunction.identity(ode.variable)
    p1 = _value_at_zero(x * ode.p, "x*p")
    p2 = _value_at_zero(x * x * ode.r, "x^2*r")
    rho = sympy.Symbol("rho")
    poly = sympy.Poly([1, sympy.Rational(p1 - 1), sympy.Rational(p2)], rho)
    roots = {str(root): multiplicity for root, multiplicity in sympy.roots(poly).items()}
    logger.debug(f"Indicial roots of {ode.name or ode.variable} at 0: {roots}")
    return IndicialEquation((p2, p1 - 1, Fraction(1)), roots)


def _theta_coefficients(ode: LinearODE2, order: int) -> Tuple[List[Fraction], List[Fraction]]:
    x = RationalFunction.identity(ode.variable)
    a = (x * ode.p - 1).to_series(order)
    b = (x * x * ode.r).to_series(order)
    return a.dense(0, order), b.dense(0, order)


def _solve_theta_recurrence(a: List[Fraction], b: List[Fraction], rhs: List[Fraction],
                            start: Fraction, order: int) -> List[Fraction]:
    """Coefficients y_n of (Theta^2 + A Theta + B) y = rhs with y_0 = start and A_0 = B_0 = 0."""
    y = [Fraction(start)]
    for n in range(1, order + 1):
        total = rhs[n]
        for j in range(1, n + 1):
            weight = a[j] * (n - j) + b[j]
            if weight:
                total -= weight * y[n - j]
        y.append(total / (n * n))
    return y


def frobenius_solutions(ode: LinearODE2, order: int) -> Tuple[ExactSeries, LogPair]:
    """
    Local solutions at 0 for a double indicial root 0.

    D1 is normalised by D1(0) = 1. D2 = D1 ln x + g with g(0) = 0; the
    recurrence fixes every other coefficient of g.

    Raises:
        ValueError: If order is not positive or 0 is irregular
        NotImplementedError: If the indicial roots are not a double root 0
    """
    if order < 1:
        raise ValueError(f"Frobenius order must be positive, got {order}")
    indicial = indicial_equation(ode)
    if not indicial.is_double_zero:
        raise NotImplementedError(
            f"only the double indicial root 0 is supported; roots are {indicial.roots}"
        )
    a, b = _theta_coefficients(ode, order)
    zeros = [Fraction(0)] * (order + 1)
    d1 = _solve_theta_recurrence(a, b, zeros, Fraction(1), order)

    # Theta-form of L(D1 ln x + g) = 0 leaves L(g) = -(2 Theta D1 + A D1).
    rhs = []
    for n in range(order + 1):
        a_times_d1 = sum((a[j] * d1[n - j] for j in range(1, n + 1)), Fraction(0))
        rhs.append(-(2 * n * d1[n] + a_times_d1))
    g = _solve_theta_recurrence(a, b, rhs, Fraction(0), order)

    variable = ode.variable
    first = ExactSeries.from_coefficients(d1, variable, order=order)
    second = LogPair(first, ExactSeries.from_coefficients(g, variable, order=order))
    logger.info(f"Frobenius solutions of {ode.name or variable} computed to order {order}")
    return first, second


def apply_ode(ode: LinearODE2, candidate: Union[ExactSeries, LogPair]) -> LogPair:
    """
    Residual y'' + p y' + r y of a candidate solution, in exact Laurent arithmetic.

    The log part of the residual is L(f); the analytic part collects the
    product-rule terms 2f'/x - f/x^2 + p f/x plus L(g).

    Raises:
        ValueError: If the candidate order is below 5 or its variable differs
    """
    if isinstance(candidate, ExactSeries):
        candidate = LogPair(ExactSeries.zero(candidate.variable, candidate.order), candidate)
    if candidate.variable != ode.variable:
        raise ValueError(f"candidate is in {candidate.variable!r}, ODE is in {ode.variable!r}")
    if candidate.order < MIN_RESIDUAL_ORDER:
        raise ValueError(f"candidate order {candidate.order} is below {MIN_RESIDUAL_ORDER}")
    p_series, r_series = ode.coefficient_series(candidate.order)
    first = candidate.derivative()
    second = first.derivative()
    return second + p_series * first + r_series * candidate


# ----------------------------------------------------------------------
# Normal forms

def q_form(ode: LinearODE2) -> RationalFunction:
    """Q = r - p^2/4 - p'/2, so that D = U V turns the equation into U'' + Q U = 0."""
    return ode.r - ode.p * ode.p / 4 - ode.p.derivative() / 2


def schwarzian_rhs(ode: LinearODE2) -> RationalFunction:
    """{t, x} = 2Q for t any ratio of independent solutions."""
    return 2 * q_form(ode)


def theta_form(ode: LinearODE2) -> ThetaForm:
    """Rewrite x^2 (y'' + p y' + r y) in powers of Theta = x d/dx."""
    x = RationalFunction.identity(ode.variable)
    return ThetaForm(RationalFunction.constant(1, ode.variable), x * ode.p - 1, x * x * ode.r,
                     ode.variable)


def from_theta_form(form: ThetaForm, name: str = "") -> LinearODE2:
    """Inverse of ``theta_form`` for any nonzero Theta^2 coefficient."""
    if form.theta2.is_zero():
        raise ValueError("Theta^2 coefficient must be nonzero")
    x = RationalFunction.identity(form.variable)
    p = (form.theta2 + form.theta1) / (form.theta2 * x)
    r = form.theta0 / (form.theta2 * x * x)
    return LinearODE2(p, r, form.variable, name)


# ----------------------------------------------------------------------
# Changes of variable

def change_variable(ode: LinearODE2, x_of_t: RationalFunction, name: str = "") -> LinearODE2:
    """Equation satisfied by Y(t) = y(x(t)) for a rational substitution x = x(t)."""
    x_prime = x_of_t.derivative()
    if x_prime.is_zero():
        raise ValueError("substitution has zero derivative")
    x_second = x_prime.derivative()
    p = ode.p.substitute(x_of_t) * x_prime - x_second / x_prime
    r = ode.r.substitute(x_of_t) * x_prime * x_prime
    return LinearODE2(p, r, x_of_t.variable, name)


def mobius_pullback(ode: LinearODE2, a, b, c, d, variable: Optional[str] = None,
                    name: str = "") -> LinearODE2:
    """
    Pull back along x = (a t + b)/(c t + d).

    Args:
        ode: Equation in x
        a, b, c, d: Rational map coefficients with ad - bc != 0
        variable: Name of the new variable (defaults to the ODE's own)
        name: Label for the resulting equation

    Raises:
        ValueError: If the map is degenerate
    """
    x_of_t = RationalFunction.mobius(a, b, c, d, variable or ode.variable)
    logger.debug(f"Pulling back {ode.name or ode.variable} along ({a}t + {b})/({c}t + {d})")
    return change_variable(ode, x_of_t, name)


def gauge_transform(ode: LinearODE2, factor: RationalFunction, name: str = "") -> LinearODE2:
    """Equation satisfied by u = factor * y."""
    if factor.is_zero():
        raise ValueError("gauge factor must be nonzero")
    psi = 1 / factor
    psi_prime = psi.derivative()
    psi_second = psi_prime.derivative()
    p = ode.p + 2 * psi_prime / psi
    r = (psi_second + ode.p * psi_prime + ode.r * psi) / psi
    return LinearODE2(p, r, ode.variable, name)


def dos_equation_from_quarter_period() -> LinearODE2:
    """The density-of-states equation derived from K's equation by D = (1 + k) K."""
    one_plus_k = RationalFunction.from_expr("1 + k", "k")
    return gauge_transform(quarter_period_equation(), one_plus_k, name="dos")


NAMED_EQUATIONS = {
    "dos": dos_equation,
    "quarter-period": quarter_period_equation,
    "legendre": legendre_equation,
    "epsilon": epsilon_equation,
    "euler": euler_equation,
}
