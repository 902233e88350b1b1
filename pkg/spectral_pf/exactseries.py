"""
Exact truncated power and Laurent series over arbitrary-precision rationals.

A series knows its truncation order N: every coefficient with exponent up to
N is exact, everything beyond is unknown and never read. Each operation
returns the tightest order it can prove, so mixing orders takes the minimum.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union
import logging

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]

DEFAULT_ORDER = 40


@dataclass(frozen=True, eq=False)
class ExactSeries:
    """Truncated Laurent series sum_{n=valuation}^{order} c_n x^n + O(x^(order+1)).

    Coefficients are stored valuation-normalized: the first stored
    coefficient is nonzero, or there are none (the series is zero through
    ``order`` and ``valuation == order + 1``).
    """

    variable: str
    valuation: int
    coefficients: Tuple[Fraction, ...]
    order: int

    def __post_init__(self):
        expected = self.order - self.valuation + 1
        if expected < 0:
            raise ValueError(
                f"valuation {self.valuation} lies beyond truncation order {self.order}"
            )
        coeffs = [Fraction(c) for c in self.coefficients]
        if len(coeffs) != expected:
            raise ValueError(
                f"expected {expected} coefficients for exponents "
                f"{self.valuation}..{self.order}, got {len(coeffs)}"
            )
        strip = 0
        while strip < len(coeffs) and coeffs[strip] == 0:
            strip += 1
        object.__setattr__(self, "coefficients", tuple(coeffs[strip:]))
        object.__setattr__(self, "valuation", self.valuation + strip)

    # ------------------------------------------------------------------
    # Constructors

    @classmethod
    def build(cls, variable: str, valuation: int, coefficients: Sequence[Scalar],
              order: int) -> "ExactSeries":
        """Build from coefficients starting at ``valuation``, cutting or zero-padding to ``order``."""
        if valuation > order:
            return cls(variable, order + 1, (), order)
        length = order - valuation + 1
        coeffs = list(coefficients[:length])
        coeffs.extend([0] * (length - len(coeffs)))
        return cls(variable, valuation, tuple(coeffs), order)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[Scalar], variable: str = "x",
                          order: int = None, valuation: int = 0) -> "ExactSeries":
        """Series with ``coefficients[i]`` at exponent ``valuation + i``.

        Without an explicit ``order`` the listed terms are taken as all that is known.
        """
        if order is None:
            order = valuation + len(coefficients) - 1
        return cls.build(variable, valuation, coefficients, order)

    @classmethod
    def from_dict(cls, terms: Dict[int, Scalar], variable: str, order: int) -> "ExactSeries":
        """Series from an ``{exponent: coefficient}`` mapping; missing exponents are zero."""
        if not terms:
            return cls.zero(variable, order)
        low = min(terms)
        coeffs = [terms.get(n, 0) for n in range(low, order + 1)]
        return cls.build(variable, low, coeffs, order)

    @classmethod
    def zero(cls, variable: str, order: int) -> "ExactSeries":
        return cls(variable, order + 1, (), order)

    @classmethod
    def one(cls, variable: str, order: int) -> "ExactSeries":
        return cls.monomial(0, variable, order)

    @classmethod
    def monomial(cls, exponent: int, variable: str, order: int,
                 coefficient: Scalar = 1) -> "ExactSeries":
        return cls.from_dict({exponent: coefficient}, variable, order)

    @classmethod
    def geometric(cls, ratio: Scalar, variable: str, order: int) -> "ExactSeries":
        """1/(1 - ratio*x) = sum ratio^n x^n."""
        ratio = Fraction(ratio)
        return cls.build(variable, 0, [ratio ** n for n in range(order + 1)], order)

    # ------------------------------------------------------------------
    # Access

    def coefficient(self, exponent: int) -> Fraction:
        """Exact coefficient of x^exponent.

        Raises:
            ValueError: If the exponent lies beyond the truncation order
        """
        if exponent > self.order:
            raise ValueError(
                f"coefficient of {self.variable}^{exponent} is beyond truncation order {self.order}"
            )
        index = exponent - self.valuation
        if index < 0:
            return Fraction(0)
        return self.coefficients[index]

    def dense(self, start: int = None, stop: int = None) -> List[Fraction]:
        """Coefficients for exponents ``start..stop`` inclusive (defaults: min(valuation, 0)..order)."""
        if start is None:
            start = min(self.valuation, 0)
        if stop is None:
            stop = self.order
        return [self.coefficient(n) for n in range(start, stop + 1)]

    def terms(self) -> Dict[int, Fraction]:
        """Nonzero known terms as ``{exponent: coefficient}``."""
        return {self.valuation + i: c for i, c in enumerate(self.coefficients) if c != 0}

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self.coefficients

    @property
    def leading_coefficient(self) -> Fraction:
        if self.is_zero():
            raise ValueError("zero series has no leading coefficient")
        return self.coefficients[0]

    def truncate(self, order: int) -> "ExactSeries":
        """Forget everything beyond ``order`` (never raises precision)."""
        if order >= self.order:
            return self
        return ExactSeries.build(self.variable, self.valuation, self.coefficients, order)

    def rename(self, variable: str) -> "ExactSeries":
        return ExactSeries.build(variable, self.valuation, self.coefficients, self.order)

    def shift(self, exponent: int) -> "ExactSeries":
        """Multiply by x^exponent."""
        return ExactSeries.build(self.variable, self.valuation + exponent, self.coefficients,
                                 self.order + exponent)

    def scale_variable(self, factor: Scalar, variable: str = None) -> "ExactSeries":
        """f(factor * x), optionally renaming the variable."""
        factor = Fraction(factor)
        if factor == 0:
            raise ValueError("scale factor must be nonzero")
        coeffs = [c * factor ** (self.valuation + i) for i, c in enumerate(self.coefficients)]
        return ExactSeries.build(variable or self.variable, self.valuation, coeffs, self.order)

    def evaluate(self, x: Union[float, complex]) -> Union[float, complex]:
        """Numeric value of the truncated sum at ``x``."""
        return sum(float(c) * x ** (self.valuation + i) for i, c in enumerate(self.coefficients))

    def agrees_with(self, other: "ExactSeries") -> int:
        """Highest exponent through which both series agree (``valuation - 1`` style sentinel on early mismatch)."""
        _check_variables(self, other)
        top = min(self.order, other.order)
        start = min(self.valuation, other.valuation)
        for n in range(start, top + 1):
            if self.coefficient(n) != other.coefficient(n):
                return n - 1
        return top

    def identical(self, other: "ExactSeries") -> bool:
        """Strict equality: same variable, order and coefficients."""
        return (
            isinstance(other, ExactSeries)
            and self.variable == other.variable
            and self.order == other.order
            and self.valuation == other.valuation
            and self.coefficients == other.coefficients
        )

    def __eq__(self, other):
        """Equal when variables match and coefficients agree on the overlap of both orders."""
        if not isinstance(other, ExactSeries):
            return NotImplemented
        if self.variable != other.variable:
            return False
        return self.agrees_with(other) == min(self.order, other.order)

    __hash__ = None

    def __repr__(self):
        return f"ExactSeries({self})"

    def __str__(self):
        parts = []
        for exponent, c in self.terms().items():
            if exponent == 0:
                monomial = ""
            elif exponent == 1:
                monomial = self.variable
            else:
                monomial = f"{self.variable}^{exponent}"
            if monomial and c == 1:
                text = monomial
            elif monomial and c == -1:
                text = f"-{monomial}"
            elif monomial:
                text = f"{c}*{monomial}"
            else:
                text = str(c)
            parts.append(text)
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{body} + O({self.variable}^{self.order + 1})"

    # ------------------------------------------------------------------
    # Arithmetic

    def _coerce(self, other) -> "ExactSeries":
        if isinstance(other, ExactSeries):
            _check_variables(self, other)
            return other
        if isinstance(other, (int, Fraction)):
            # Exact constants carry no truncation of their own.
            return ExactSeries.from_dict({0: other}, self.variable, max(self.order, 0))
        return None

    def __neg__(self) -> "ExactSeries":
        return ExactSeries.build(self.variable, self.valuation, [-c for c in self.coefficients],
                                 self.order)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        order = min(self.order, other.order)
        low = min(self.valuation, other.valuation)
        coeffs = [self.coefficient(n) + other.coefficient(n) for n in range(low, order + 1)]
        return ExactSeries.build(self.variable, low, coeffs, order)

    __radd__ = __add__

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
        if isinstance(other, (int, Fraction)):
            factor = Fraction(other)
            return ExactSeries.build(self.variable, self.valuation,
                                     [c * factor for c in self.coefficients], self.order)
        if not isinstance(other, ExactSeries):
            return NotImplemented
        _check_variables(self, other)
        order = min(self.order + other.valuation, other.order + self.valuation)
        low = self.valuation + other.valuation
        a, b = self.coefficients, other.coefficients
        coeffs = []
        for n in range(low, order + 1):
            shift = n - low
            total = Fraction(0)
            for i in range(max(0, shift - len(b) + 1), min(shift, len(a) - 1) + 1):
                total += a[i] * b[shift - i]
            coeffs.append(total)
        return ExactSeries.build(self.variable, low, coeffs, order)

    __rmul__ = __mul__

    def inverse(self) -> "ExactSeries":
        """Multiplicative inverse x^(-v) / B(x) of x^v B(x), B(0) != 0.

        Raises:
            ValueError: For an identically-zero series
        """
        if self.is_zero():
            raise ValueError("division by an identically-zero series")
        b = self.coefficients
        precision = self.order - self.valuation
        head = b[0]
        inv = [1 / head]
        for n in range(1, precision + 1):
            total = sum((b[i] * inv[n - i] for i in range(1, min(n, len(b) - 1) + 1)), Fraction(0))
            inv.append(-total / head)
        return ExactSeries.build(self.variable, -self.valuation, inv,
                                 self.order - 2 * self.valuation)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ValueError("division by zero scalar")
            return self * (1 / Fraction(other))
        if not isinstance(other, ExactSeries):
            return NotImplemented
        _check_variables(self, other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * Fraction(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "ExactSeries":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ExactSeries.one(self.variable, self.order - self.valuation)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # ------------------------------------------------------------------
    # Calculus

    def derivative(self) -> "ExactSeries":
        coeffs = [(self.valuation + i) * c for i, c in enumerate(self.coefficients)]
        return ExactSeries.build(self.variable, self.valuation - 1, coeffs, self.order - 1)

    def integral(self) -> "ExactSeries":
        """Antiderivative with zero constant term.

        Raises:
            ValueError: If the series has a residue (x^-1 term)
        """
        if self.order >= -1 and self.coefficient(-1) != 0:
            raise ValueError("cannot integrate a series with a nonzero x^-1 term")
        coeffs = [c / (self.valuation + i + 1) if self.valuation + i != -1 else Fraction(0)
                  for i, c in enumerate(self.coefficients)]
        return ExactSeries.build(self.variable, self.valuation + 1, coeffs, self.order + 1)

    # ------------------------------------------------------------------
    # Composition, reversion and transcendental functions

    def compose(self, inner: "ExactSeries") -> "ExactSeries":
        """self(inner(x)) for inner(0) = 0.

        Raises:
            ValueError: If inner has a nonzero constant term or self has negative valuation
        """
        if self.valuation < 0 and not self.is_zero():
            raise ValueError("outer series of a composition must be a power series")
        if inner.valuation < 1:
            raise ValueError("inner series of a composition must vanish at 0 (nonzero constant term)")
        order = min((self.order + 1) * inner.valuation - 1, inner.order)
        if order < 0:
            return ExactSeries.zero(inner.variable, order)
        g = inner.dense(0, order)
        acc = [Fraction(0)] * (order + 1)
        for exponent in range(self.order, -1, -1):
            nxt = [Fraction(0)] * (order + 1)
            for i, a in enumerate(acc):
                if a == 0:
                    continue
                for j in range(1, order + 1 - i):
                    if g[j]:
                        nxt[i + j] += a * g[j]
            nxt[0] += self.coefficient(exponent)
            acc = nxt
        return ExactSeries.build(inner.variable, 0, acc, order)

    def reverse(self) -> "ExactSeries":
        """Compositional inverse h with self(h(x)) = x, by Lagrange inversion.

        Raises:
            ValueError: If self(0) != 0 or the linear term vanishes
        """
        if self.valuation != 1:
            raise ValueError(
                "series reversion needs f(0) = 0 and a nonzero linear term "
                f"(valuation is {self.valuation})"
            )
        order = self.order
        phi = self.shift(-1).inverse()
        power = ExactSeries.one(self.variable, order - 1)
        coeffs = {}
        for n in range(1, order + 1):
            power = (power * phi).truncate(order - 1)
            coeffs[n] = power.coefficient(n - 1) / n
        logger.debug(f"Reversed series to order {order}")
        return ExactSeries.from_dict(coeffs, self.variable, order)

    def exp(self) -> "ExactSeries":
        """exp(f) for f(0) = 0."""
        if self.valuation < 1:
            raise ValueError("exp needs a series with f(0) = 0")
        f = self.dense(0, self.order)
        h = [Fraction(1)]
        for n in range(1, self.order + 1):
            total = sum((k * f[k] * h[n - k] for k in range(1, n + 1)), Fraction(0))
            h.append(total / n)
        return ExactSeries.build(self.variable, 0, h, self.order)

    def log(self) -> "ExactSeries":
        """log(f) for f(0) = 1."""
        if self.valuation != 0 or self.coefficients[0] != 1:
            raise ValueError("log needs a series with f(0) = 1")
        return (self.derivative() / self).integral()

    def sqrt(self) -> "ExactSeries":
        """Square root with constant term +1, for f(0) = 1."""
        if self.valuation != 0 or self.coefficients[0] != 1:
            raise ValueError("sqrt needs a series with f(0) = 1")
        f = self.dense(0, self.order)
        h = [Fraction(1)]
        for n in range(1, self.order + 1):
            cross = sum((h[k] * h[n - k] for k in range(1, n)), Fraction(0))
            h.append((f[n] - cross) / 2)
        return ExactSeries.build(self.variable, 0, h, self.order)


@dataclass(frozen=True)
class LogPair:
    """f*ln(x) + g with f, g exact series in the same variable, truncated together."""

    log_part: ExactSeries
    analytic_part: ExactSeries = field(default=None)

    def __post_init__(self):
        f, g = self.log_part, self.analytic_part
        if g is None:
            g = ExactSeries.zero(f.variable, f.order)
        _check_variables(f, g)
        order = min(f.order, g.order)
        object.__setattr__(self, "log_part", f.truncate(order))
        object.__setattr__(self, "analytic_part", g.truncate(order))

    @property
    def variable(self) -> str:
        return self.log_part.variable

    @property
    def order(self) -> int:
        return self.log_part.order

    def is_zero(self) -> bool:
        return self.log_part.is_zero() and self.analytic_part.is_zero()

    def derivative(self) -> "LogPair":
        """(f ln x + g)' = f' ln x + (f/x + g')."""
        f, g = self.log_part, self.analytic_part
        return LogPair(f.derivative(), f.shift(-1) + g.derivative())

    def __add__(self, other):
        if isinstance(other, LogPair):
            return LogPair(self.log_part + other.log_part, self.analytic_part + other.analytic_part)
        if isinstance(other, (ExactSeries, int, Fraction)):
            return LogPair(self.log_part, self.analytic_part + other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return LogPair(-self.log_part, -self.analytic_part)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (ExactSeries, int, Fraction)):
            return LogPair(self.log_part * other, self.analytic_part * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (ExactSeries, int, Fraction)):
            return LogPair(self.log_part / other, self.analytic_part / other)
        return NotImplemented

    def __str__(self):
        return f"({self.log_part})*ln({self.variable}) + {self.analytic_part}"


def _check_variables(a: ExactSeries, b: ExactSeries) -> None:
    if a.variable != b.variable:
        raise ValueError(f"variable mismatch: {a.variable!r} vs {b.variable!r}")


def series_arith(a: ExactSeries, b: ExactSeries, op: str) -> ExactSeries:
    """Exact add/sub/mul/div of two series in the same variable."""
    _check_variables(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown series operation {op!r}")


def series_compose(f: ExactSeries, g: ExactSeries) -> ExactSeries:
    return f.compose(g)


def series_reverse(f: ExactSeries) -> ExactSeries:
    return f.reverse()


def series_transcendental(f: ExactSeries, op: str) -> ExactSeries:
    """exp, log or sqrt of a series."""
    operations = {"exp": f.exp, "log": f.log, "sqrt": f.sqrt}
    if op not in operations:
        raise ValueError(f"unknown transcendental operation {op!r}")
    return operations[op]()


def schwarzian_of_derivative(f_prime: ExactSeries) -> ExactSeries:
    """{f, x} = (f''/f')' - (f''/f')^2 / 2, computed from f' alone."""
    w = f_prime.derivative() / f_prime
    return w.derivative() - (w * w) / 2


def schwarzian_of_logpair(t_prime: ExactSeries) -> ExactSeries:
    """Schwarzian {t, x} of t = ln x + h(x), given t' (valuation -1, residue 1).

    Raises:
        ValueError: If t' does not have valuation -1 with residue coefficient 1
    """
    if t_prime.valuation != -1 or t_prime.coefficient(-1) != 1:
        raise ValueError(
            "schwarzian_of_logpair expects t' = 1/x + O(1); "
            f"got valuation {t_prime.valuation}"
        )
    return schwarzian_of_derivative(t_prime)
