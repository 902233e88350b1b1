"""
Complete elliptic integrals, Landen transformations and the density of states.

Floating point throughout; K and E come from the arithmetic-geometric mean.
"""

from dataclasses import dataclass
from typing import List, Tuple
import logging
import math

from spectral_pf.schema import DOSParams

logger = logging.getLogger(__name__)

AGM_RELATIVE_TOL = 1e-16
AGM_MAX_ITERATIONS = 64
HYP2F1_MAX_TERMS = 200000


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus k with complementary modulus k' = sqrt(1 - k^2)."""

    k: float
    k_prime: float

    @classmethod
    def from_k(cls, k: float) -> "Modulus":
        _check_modulus(k, allow_zero=True)
        return cls(k, complementary(k))

    def __post_init__(self):
        if abs(self.k ** 2 + self.k_prime ** 2 - 1.0) > 1e-15 * 4:
            raise ValueError(f"k^2 + k'^2 != 1 for k={self.k}, k'={self.k_prime}")


def _check_modulus(k: float, allow_zero: bool = False) -> None:
    low_ok = k >= 0 if allow_zero else k > 0
    if not (low_ok and k < 1):
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise ValueError(f"elliptic modulus must lie in {interval}, got {k}")


def complementary(k: float) -> float:
    """k' = sqrt((1 - k)(1 + k)), accurate near k = 1."""
    return math.sqrt((1.0 - k) * (1.0 + k))


def _agm_iterate(a0: float, b0: float) -> Tuple[float, List[float]]:
    if a0 <= 0 or b0 <= 0:
        raise ValueError(f"agm needs positive arguments, got ({a0}, {b0})")
    a, b = float(a0), float(b0)
    halves = []
    for _ in range(AGM_MAX_ITERATIONS):
        if abs(a - b) <= AGM_RELATIVE_TOL * a:
            break
        halves.append((a - b) / 2.0)
        a, b = (a + b) / 2.0, math.sqrt(a * b)
    return a, halves


def agm(a0: float, b0: float) -> float:
    """Arithmetic-geometric mean of two positive reals."""
    return _agm_iterate(a0, b0)[0]


def ellip_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k'))."""
    _check_modulus(k, allow_zero=True)
    return math.pi / (2.0 * agm(1.0, complementary(k)))


def ellip_E(k: float) -> float:
    """Complete elliptic integral of the second kind.

    E = K (1 - sum_{n>=0} 2^(n-1) c_n^2) with c_0 = k and c_{n+1} the AGM half-differences.
    """
    _check_modulus(k, allow_zero=True)
    mean, halves = _agm_iterate(1.0, complementary(k))
    correction = 0.5 * k * k + sum(2.0 ** n * c * c for n, c in enumerate(halves))
    return math.pi / (2.0 * mean) * (1.0 - correction)


def dK_dk(k: float) -> float:
    _check_modulus(k)
    return ellip_E(k) / (k * (1.0 - k * k)) - ellip_K(k) / k


def dE_dk(k: float) -> float:
    _check_modulus(k)
    return (ellip_E(k) - ellip_K(k)) / k


def legendre_relation(k: float) -> float:
    """Residual E K' + E' K - K K' - pi/2 (zero up to rounding)."""
    _check_modulus(k)
    kp = complementary(k)
    big_k, big_kp = ellip_K(k), ellip_K(kp)
    return ellip_E(k) * big_kp + ellip_E(kp) * big_k - big_k * big_kp - math.pi / 2.0


def landen(k: float, direction: str = "ascend") -> float:
    """
    Landen transformation of the modulus.

    Args:
        k: Modulus in (0, 1)
        direction: "ascend" gives 2 sqrt(k)/(1 + k); "descend" is its inverse

    Raises:
        ValueError: For k outside (0, 1) or an unknown direction
    """
    _check_modulus(k)
    if direction == "ascend":
        return 2.0 * math.sqrt(k) / (1.0 + k)
    if direction == "descend":
        kp = complementary(k)
        return (1.0 - kp) / (1.0 + kp)
    raise ValueError(f"unknown Landen direction {direction!r}")


def landen_complement(k: float) -> float:
    """Complementary modulus of the ascended one, (1 - k)/(1 + k)."""
    _check_modulus(k, allow_zero=True)
    return (1.0 - k) / (1.0 + k)


def period_ratio(k: float) -> float:
    """Imaginary part of tau = i K'/K."""
    _check_modulus(k)
    return ellip_K(complementary(k)) / ellip_K(k)


def nome(k: float) -> float:
    """q = exp(i pi tau) = exp(-pi K'/K)."""
    return math.exp(-math.pi * period_ratio(k))


def quotient_law(k: float) -> Tuple[float, float]:
    """(K'/K, 2 K1'/K1) for the ascended modulus k1; equal up to rounding."""
    k1 = landen(k, "ascend")
    return period_ratio(k), 2.0 * period_ratio(k1)


def hyp2f1_half(m: float) -> float:
    """2F1(1/2, 1/2; 1; m) summed with the termwise ratio ((n + 1/2)/(n + 1))^2 m."""
    if not 0 <= m < 1:
        raise ValueError(f"hyp2f1_half needs 0 <= m < 1, got {m}")
    total, term = 1.0, 1.0
    for n in range(HYP2F1_MAX_TERMS):
        ratio = (n + 0.5) / (n + 1.0)
        term *= ratio * ratio * m
        total += term
        if term <= 1e-17 * total:
            break
    return total


def epsilon_to_modulus(epsilon: float) -> float:
    """k = (1 - eps)/(1 + eps)."""
    if not 0 < epsilon <= 1:
        raise ValueError(
            f"energy level must lie in (0, 1], got {epsilon} "
            "(eps = 0 is the singular I2 fiber)"
        )
    return (1.0 - epsilon) / (1.0 + epsilon)


def _prefactor(params: DOSParams) -> float:
    return 1.0 / (2.0 * math.pi ** 2 * params.a * params.b)


def dos_value(params: DOSParams) -> float:
    """Density of states (1 + k) K(k) / (2 pi^2 a b) with k = (1 - eps)/(1 + eps)."""
    k = epsilon_to_modulus(params.epsilon)
    return _prefactor(params) * (1.0 + k) * ellip_K(k)


def dos_value_landen(params: DOSParams) -> float:
    """Same density of states through the ascended modulus, K(2 sqrt(k)/(1 + k)) / (2 pi^2 a b)."""
    k = epsilon_to_modulus(params.epsilon)
    k1 = landen(k, "ascend") if k > 0 else 0.0
    return _prefactor(params) * ellip_K(k1)


def dos_value_hypergeometric(params: DOSParams) -> float:
    """(pi/2) 2F1(1/2, 1/2; 1; 1 - eps^2) / (2 pi^2 a b)."""
    epsilon_to_modulus(params.epsilon)
    m = 1.0 - params.epsilon ** 2
    return _prefactor(params) * math.pi / 2.0 * hyp2f1_half(m)
