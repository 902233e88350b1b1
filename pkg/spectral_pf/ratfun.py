"""
Exact rational functions of one variable over the rationals.

Values are kept in canonical form: numerator and denominator coprime, the
denominator monic. Polynomial arithmetic and gcds are delegated to sympy
``Poly`` objects over ``QQ``.
"""

from fractions import Fraction
from typing import List, Sequence, Tuple, Union
import logging

import sympy
from sympy import Poly, QQ
from sympy.polys.polyerrors import BasePolynomialError

from spectral_pf.exactseries import ExactSeries

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


def _to_fraction(value) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _to_rational(value: Scalar) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


class RationalFunction:
    """numerator(x) / denominator(x) in lowest terms with a monic denominator."""

    __slots__ = ("variable", "numerator", "denominator")

    def __init__(self, numerator: Poly, denominator: Poly, variable: str = None):
        variable = variable or str(numerator.gens[0])
        symbol = sympy.Symbol(variable)
        num = Poly(numerator.as_expr(), symbol, domain=QQ)
        den = Poly(denominator.as_expr(), symbol, domain=QQ)
        if den.is_zero:
            raise ValueError("denominator of a rational function is identically zero")
        if num.is_zero:
            den = Poly(1, symbol, domain=QQ)
        else:
            common = num.gcd(den)
            num = num.exquo(common)
            den = den.exquo(common)
            lead = den.LC()
            num = num.quo_ground(lead)
            den = den.monic()
        self.variable = variable
        self.numerator = num
        self.denominator = den

    # ------------------------------------------------------------------
    # Constructors

    @classmethod
    def from_expr(cls, expr, variable: str = "x") -> "RationalFunction":
        """Parse a sympy expression (or string) that is rational in ``variable``.

        Raises:
            ValueError: If the expression is not a rational function of the variable
        """
        symbol = sympy.Symbol(variable)
        try:
            combined = sympy.cancel(sympy.together(sympy.sympify(expr)))
            num, den = sympy.fraction(combined)
            return cls(Poly(num, symbol, domain=QQ), Poly(den, symbol, domain=QQ), variable)
        except (BasePolynomialError, sympy.SympifyError, TypeError) as e:
            raise ValueError(f"Not a rational function of {variable}: {expr!r}: {e}") from e

    @classmethod
    def from_coefficients(cls, numerator: Sequence[Scalar], denominator: Sequence[Scalar] = (1,),
                          variable: str = "x") -> "RationalFunction":
        """Build from ascending-degree coefficient lists."""
        symbol = sympy.Symbol(variable)
        num = Poly([_to_rational(c) for c in reversed(list(numerator))] or [0], symbol, domain=QQ)
        den = Poly([_to_rational(c) for c in reversed(list(denominator))] or [0], symbol, domain=QQ)
        return cls(num, den, variable)

    @classmethod
    def constant(cls, value: Scalar, variable: str = "x") -> "RationalFunction":
        return cls.from_coefficients([value], [1], variable)

    @classmethod
    def identity(cls, variable: str = "x") -> "RationalFunction":
        return cls.from_coefficients([0, 1], [1], variable)

    @classmethod
    def mobius(cls, a: Scalar, b: Scalar, c: Scalar, d: Scalar,
               variable: str = "x") -> "RationalFunction":
        """(a x + b) / (c x + d)."""
        if Fraction(a) * Fraction(d) - Fraction(b) * Fraction(c) == 0:
            raise ValueError(f"degenerate Moebius map ({a}, {b}, {c}, {d}): ad - bc = 0")
        return cls.from_coefficients([b, a], [d, c], variable)

    # ------------------------------------------------------------------
    # Inspection

    @property
    def symbol(self) -> sympy.Symbol:
        return sympy.Symbol(self.variable)

    def numerator_coefficients(self) -> List[Fraction]:
        """Ascending-degree numerator coefficients."""
        return [_to_fraction(c) for c in reversed(self.numerator.all_coeffs())]

    def denominator_coefficients(self) -> List[Fraction]:
        """Ascending-degree denominator coefficients."""
        return [_to_fraction(c) for c in reversed(self.denominator.all_coeffs())]

    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def is_constant(self) -> bool:
        return self.numerator.degree() <= 0 and self.denominator.degree() == 0

    def valuation_at_zero(self) -> int:
        """Order of vanishing at x = 0 (negative for a pole)."""
        if self.is_zero():
            raise ValueError("zero function has no valuation")

        def low_degree(coeffs: List[Fraction]) -> int:
            return next(i for i, c in enumerate(coeffs) if c != 0)

        return low_degree(self.numerator_coefficients()) - low_degree(self.denominator_coefficients())

    def to_expr(self) -> sympy.Expr:
        return self.numerator.as_expr() / self.denominator.as_expr()

    def __str__(self):
        if self.denominator.degree() == 0:
            return str(self.numerator.as_expr())
        return f"({self.numerator.as_expr()})/({self.denominator.as_expr()})"

    def __repr__(self):
        return f"RationalFunction({self}, variable={self.variable!r})"

    # ------------------------------------------------------------------
    # Arithmetic

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.variable != self.variable:
                raise ValueError(f"variable mismatch: {self.variable!r} vs {other.variable!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(other, self.variable)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
            self.variable,
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator, self.variable)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.numerator * other.numerator,
                                self.denominator * other.denominator, self.variable)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ValueError("division by the zero rational function")
        return RationalFunction(self.numerator * other.denominator,
                                self.denominator * other.numerator, self.variable)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return RationalFunction.constant(1, self.variable) / (self ** (-exponent))
        return RationalFunction(self.numerator ** exponent, self.denominator ** exponent,
                                self.variable)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.constant(other, self.variable)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return ratfun_equal(self, other)

    def __hash__(self):
        return hash((self.variable, tuple(self.numerator_coefficients()),
                     tuple(self.denominator_coefficients())))

    # ------------------------------------------------------------------
    # Calculus and evaluation

    def derivative(self) -> "RationalFunction":
        num, den = self.numerator, self.denominator
        return RationalFunction(num.diff() * den - num * den.diff(), den ** 2, self.variable)

    def substitute(self, inner: "RationalFunction") -> "RationalFunction":
        """self(inner(y)) as a rational function of inner's variable."""
        expr = self.to_expr().subs(self.symbol, inner.to_expr())
        return RationalFunction.from_expr(expr, inner.variable)

    def rename(self, variable: str) -> "RationalFunction":
        return RationalFunction.from_coefficients(self.numerator_coefficients(),
                                                  self.denominator_coefficients(), variable)

    def evaluate(self, x: Union[Scalar, float, complex]):
        """Value at ``x``: exact ``Fraction`` for rational input, float/complex otherwise.

        Raises:
            ValueError: At a pole
        """
        if isinstance(x, (int, Fraction)):
            point = _to_rational(x)
            den = self.denominator.eval(point)
            if den == 0:
                raise ValueError(f"pole of {self} at {x}")
            return _to_fraction(self.numerator.eval(point) / den)
        num = sum(float(c) * x ** i for i, c in enumerate(self.numerator_coefficients()))
        den = sum(float(c) * x ** i for i, c in enumerate(self.denominator_coefficients()))
        if den == 0:
            raise ValueError(f"pole of {self} at {x}")
        return num / den

    def to_series(self, order: int, variable: str = None) -> ExactSeries:
        """Laurent expansion at 0 through x^order."""
        variable = variable or self.variable
        num = self.numerator_coefficients()
        den = self.denominator_coefficients()
        den_low = next(i for i, c in enumerate(den) if c != 0)
        # Polynomials are exact at any order; pad enough to reach ``order`` after division.
        num_series = ExactSeries.from_coefficients(num, variable, order=order + den_low)
        den_series = ExactSeries.from_coefficients(den, variable, order=order + 2 * den_low)
        return (num_series / den_series).truncate(order)

    def evaluate_series(self, series: ExactSeries) -> ExactSeries:
        """self(series) by Horner on numerator and denominator; series(0) may be nonzero."""

        def horner(coefficients: List[Fraction]) -> ExactSeries:
            acc = ExactSeries.zero(series.variable, series.order)
            for c in reversed(coefficients):
                acc = acc * series + c
            return acc

        return horner(self.numerator_coefficients()) / horner(self.denominator_coefficients())

    def to_payload(self) -> Tuple[List[Fraction], List[Fraction]]:
        return self.numerator_coefficients(), self.denominator_coefficients()


def ratfun_equal(a: RationalFunction, b: RationalFunction) -> bool:
    """True iff a.num * b.den == b.num * a.den as polynomials in the same variable."""
    if a.variable != b.variable:
        return False
    return (a.numerator * b.denominator - b.numerator * a.denominator).is_zero
