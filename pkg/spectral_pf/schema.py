"""
Pydantic models for exact series payloads, parameters and verification reports.
"""

from datetime import datetime
from math import gcd
from typing import Dict, List, Literal, Optional, Tuple
import logging

from pydantic import BaseModel, Field, field_validator, model_validator

from spectral_pf.exactseries import ExactSeries
from spectral_pf.utils import format_fraction, parse_fraction

logger = logging.getLogger(__name__)


class SeriesPayload(BaseModel):
    """Exact series in JSON form; ``coefficients[i]`` multiplies ``variable^(valuation + i)``."""

    variable: str = Field(..., description="Series variable name")
    valuation: int = Field(..., description="Exponent of the first listed coefficient")
    order: int = Field(..., description="Truncation order N, meaning O(x^(N+1))")
    coefficients: List[str] = Field(..., description="Exact coefficients as num/den strings")

    class Config:
        json_schema_extra = {
            "example": {
                "variable": "k",
                "valuation": 0,
                "order": 4,
                "coefficients": ["1", "1", "1/4", "1/4", "9/64"],
            }
        }

    @field_validator("coefficients")
    @classmethod
    def coefficients_are_exact(cls, value: List[str]) -> List[str]:
        for text in value:
            parse_fraction(text)
        return value

    @model_validator(mode="after")
    def length_matches_order(self) -> "SeriesPayload":
        expected = self.order - self.valuation + 1
        if expected < 0 or len(self.coefficients) != expected:
            raise ValueError(
                f"expected {max(expected, 0)} coefficients for exponents "
                f"{self.valuation}..{self.order}, got {len(self.coefficients)}"
            )
        return self


class RatFunPayload(BaseModel):
    """Rational function as ascending-degree coefficient strings."""

    num: List[str]
    den: List[str]


class ODEPayload(BaseModel):
    p: RatFunPayload
    r: RatFunPayload
    variable: str


class DOSParams(BaseModel):
    """Energy level and lattice periods for the density of states."""

    epsilon: float = Field(..., gt=0, le=1, description="Energy level |lambda|/4")
    a: int = Field(2, ge=1)
    b: int = Field(3, ge=1)

    @model_validator(mode="after")
    def periods_coprime(self) -> "DOSParams":
        if gcd(self.a, self.b) != 1:
            raise ValueError(f"periods a={self.a} and b={self.b} must be coprime")
        return self


class FluxRational(BaseModel):
    """Rational magnetic flux p/q in lowest terms with 0 <= p < q."""

    p: int = Field(..., ge=0)
    q: int = Field(..., ge=1)

    @model_validator(mode="after")
    def reduced(self) -> "FluxRational":
        if self.p >= self.q:
            raise ValueError(f"flux numerator {self.p} must be below denominator {self.q}")
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"flux {self.p}/{self.q} is not in lowest terms")
        return self

    def __str__(self):
        return f"{self.p}/{self.q}"


class BlochIndex(BaseModel):
    """Component label (k, l, m, n) of the Bloch variety plus the fluxes and periods."""

    k: int
    l: int
    m: int
    n: int
    alpha: float
    beta: float
    a: int = Field(..., ge=1)
    b: int = Field(..., ge=1)

    @model_validator(mode="after")
    def residues_in_range(self) -> "BlochIndex":
        if not 0 <= self.m < self.a:
            raise ValueError(f"m={self.m} must lie in [0, {self.a})")
        if not 0 <= self.n < self.b:
            raise ValueError(f"n={self.n} must lie in [0, {self.b})")
        return self


class SpectrumSlice(BaseModel):
    flux: FluxRational
    intervals: List[Tuple[float, float]] = Field(default_factory=list)

    @field_validator("intervals")
    @classmethod
    def sorted_disjoint(cls, value: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for lo, hi in value:
            if lo > hi:
                raise ValueError(f"band [{lo}, {hi}] is inverted")
        for (_, hi), (lo, _) in zip(value, value[1:]):
            if lo <= hi:
                raise ValueError("bands must be sorted and disjoint")
        return value


class ComplexValue(BaseModel):
    re: float
    im: float

    @classmethod
    def of(cls, value: complex) -> "ComplexValue":
        value = complex(value)
        return cls(re=value.real, im=value.imag)


class FiberReport(BaseModel):
    """Classification of the Fermi curve at one energy."""

    lam: ComplexValue
    kind: Literal["generic", "I1", "I2"]
    singular_points: List[Tuple[ComplexValue, ComplexValue]] = Field(default_factory=list)
    components: List[str] = Field(default_factory=list)
    branch_points: List[ComplexValue] = Field(default_factory=list)
    collisions: List[ComplexValue] = Field(default_factory=list)
    mu: ComplexValue


class DOSReport(BaseModel):
    epsilon: float
    a: int
    b: int
    modulus: float
    direct: float
    landen: float
    hypergeometric: float
    lambert: float
    lambert_tail_bound: float
    max_deviation: float


class CheckResult(BaseModel):
    """Outcome of one verification check; ``flag`` reports without failing."""

    group: str
    name: str
    status: Literal["pass", "fail", "flag"]
    detail: str = ""


class VerificationReport(BaseModel):
    started_at: datetime = Field(default_factory=datetime.utcnow)
    order: int
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for check in self.checks if check.status == "pass")

    @property
    def failed(self) -> int:
        return sum(1 for check in self.checks if check.status == "fail")

    @property
    def flagged(self) -> int:
        return sum(1 for check in self.checks if check.status == "flag")

    @property
    def ok(self) -> bool:
        return self.failed == 0


class InstantonTable(BaseModel):
    d_max: int
    numbers: Dict[int, int]


class RunSummary(BaseModel):
    id: int
    started_at: datetime
    order: int
    passed: int
    failed: int
    flagged: int
    status: str
    checks: Optional[List[CheckResult]] = None


def series_to_payload(series: ExactSeries) -> SeriesPayload:
    """
    Serialize an ExactSeries.

    Power series are listed from exponent 0 so that position equals exponent;
    Laurent series start at their valuation.
    """
    start = min(series.valuation, 0)
    start = min(start, series.order + 1)
    return SeriesPayload(
        variable=series.variable,
        valuation=start,
        order=series.order,
        coefficients=[format_fraction(c) for c in series.dense(start, series.order)],
    )


def payload_to_series(payload: SeriesPayload) -> ExactSeries:
    """
    Rebuild an ExactSeries from its payload.

    Raises:
        ValueError: If a coefficient is not an exact rational
    """
    try:
        coefficients = [parse_fraction(text) for text in payload.coefficients]
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Failed to parse series payload: {e}") from e
    return ExactSeries.build(payload.variable, payload.valuation, coefficients, payload.order)


def ratfun_to_payload(function) -> RatFunPayload:
    num, den = function.to_payload()
    return RatFunPayload(num=[format_fraction(c) for c in num],
                         den=[format_fraction(c) for c in den])


def ode_to_payload(ode) -> ODEPayload:
    return ODEPayload(p=ratfun_to_payload(ode.p), r=ratfun_to_payload(ode.r),
                      variable=ode.variable)
