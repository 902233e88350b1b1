"""
Picard-Lefschetz actions on the rank-2 cycle lattice of a Fermi curve.

Cycles are integer vectors in a fixed basis (e1, e2) with e1.e2 given by an
IntersectionForm. The lemma checks use the basis (delta1, gamma) and only the
pairings their proofs state.
"""

from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Sequence, Tuple, Union
import cmath
import logging

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

COLLISION_TOL = 1e-12


@dataclass(frozen=True)
class CycleVector:
    x1: int
    x2: int

    @property
    def coordinates(self) -> Tuple[int, int]:
        return (self.x1, self.x2)

    def __add__(self, other: "CycleVector") -> "CycleVector":
        return CycleVector(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "CycleVector") -> "CycleVector":
        return CycleVector(self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "CycleVector":
        return CycleVector(-self.x1, -self.x2)

    def __rmul__(self, scalar: int) -> "CycleVector":
        return CycleVector(scalar * self.x1, scalar * self.x2)


@dataclass(frozen=True)
class IntersectionForm:
    """Skew pairing with e1.e2 = pairing."""

    pairing: int = 1

    def pair(self, x: CycleVector, y: CycleVector) -> int:
        return self.pairing * (x.x1 * y.x2 - x.x2 * y.x1)

    @property
    def matrix(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return ((0, self.pairing), (-self.pairing, 0))


@dataclass(frozen=True)
class SL2Matrix:
    """[[a, b], [c, d]] with ad - bc = 1, acting on column vectors."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(
                f"determinant of [[{self.a}, {self.b}], [{self.c}, {self.d}]] is "
                f"{self.a * self.d - self.b * self.c}, not 1"
            )

    @classmethod
    def identity(cls) -> "SL2Matrix":
        return cls(1, 0, 0, 1)

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __matmul__(self, other: "SL2Matrix") -> "SL2Matrix":
        return SL2Matrix(
            self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "SL2Matrix":
        return SL2Matrix(self.d, -self.b, -self.c, self.a)

    def conjugate(self, g: "SL2Matrix") -> "SL2Matrix":
        """g m g^-1."""
        return g @ self @ g.inverse()

    def apply(self, x: CycleVector) -> CycleVector:
        return CycleVector(self.a * x.x1 + self.b * x.x2, self.c * x.x1 + self.d * x.x2)

    def rows(self) -> List[List[int]]:
        return [[self.a, self.b], [self.c, self.d]]


# ----------------------------------------------------------------------
# Picard-Lefschetz

def pl_transform(x: CycleVector, delta: CycleVector, form: IntersectionForm,
                 power: int = 1) -> CycleVector:
    """T^power(x) = x - power (x.delta) delta; power = -1 is the opposite orientation."""
    return x - (power * form.pair(x, delta)) * delta


def pl_matrix(delta: CycleVector, form: IntersectionForm, power: int = 1) -> SL2Matrix:
    """Matrix of T_delta^power in the lattice basis."""
    first = pl_transform(CycleVector(1, 0), delta, form, power)
    second = pl_transform(CycleVector(0, 1), delta, form, power)
    return SL2Matrix(first.x1, second.x1, first.x2, second.x2)


class IdentityCheck(BaseModel):
    name: str
    expected: Tuple[int, int]
    actual: Tuple[int, int]
    holds: bool
    steps: List[Tuple[str, Tuple[int, int]]] = Field(default_factory=list)


class LemmaReport(BaseModel):
    """Lattice identities of one lemma, in the basis (delta1, gamma)."""

    lemma: str
    pairings: Dict[str, int]
    cycles: Dict[str, Tuple[int, int]]
    identities: List[IdentityCheck]

    @property
    def holds(self) -> bool:
        return all(identity.holds for identity in self.identities)


def _identity(name: str, expected: CycleVector, actual: CycleVector,
              steps: Sequence[Tuple[str, CycleVector]] = ()) -> IdentityCheck:
    return IdentityCheck(
        name=name,
        expected=expected.coordinates,
        actual=actual.coordinates,
        holds=expected == actual,
        steps=[(label, cycle.coordinates) for label, cycle in steps],
    )


def _basis(form: IntersectionForm) -> Tuple[CycleVector, CycleVector]:
    if form.pairing != 1:
        raise ValueError(f"the lemma checks need delta1.gamma = 1, form pairs e1.e2 = {form.pairing}")
    return CycleVector(1, 0), CycleVector(0, 1)


def verify_lemma1(form: IntersectionForm = IntersectionForm()) -> LemmaReport:
    """
    Local monodromies at lambda = 4, -4, 0.

    delta2 = -delta1, so delta1.gamma = 1 and delta2.gamma = -1. T4 and T-4 are
    the twists about delta1 and delta2; T0 composes the opposite-orientation
    twists of the two simultaneous nodes.
    """
    delta1, gamma = _basis(form)
    delta2 = -delta1
    t4 = pl_transform(gamma, delta1, form)
    t_minus4 = pl_transform(gamma, delta2, form)
    half = pl_transform(gamma, delta1, form, power=-1)
    t0 = pl_transform(half, delta2, form, power=-1)
    return LemmaReport(
        lemma="lemma1",
        pairings={
            "delta1.gamma": form.pair(delta1, gamma),
            "delta2.gamma": form.pair(delta2, gamma),
            "delta1.delta2": form.pair(delta1, delta2),
        },
        cycles={"delta1": delta1.coordinates, "delta2": delta2.coordinates,
                "gamma": gamma.coordinates},
        identities=[
            _identity("T4(gamma) = gamma + delta1", gamma + delta1, t4),
            _identity("T-4(gamma) = gamma - delta2", gamma - delta2, t_minus4),
            _identity("T0(gamma) = gamma - delta1 + delta2", gamma - delta1 + delta2, t0,
                      steps=[("after node 1", half), ("after node 2", t0)]),
            _identity("T4(delta1) = delta1", delta1, pl_transform(delta1, delta1, form)),
        ],
    )


def verify_lemma2(form: IntersectionForm = IntersectionForm()) -> LemmaReport:
    """
    Monodromies S0, S1 of the energy-level family.

    Pairings: delta1.gamma = 1, delta2.gamma = 1, delta3.gamma = -1. S1 is the
    squared twist about delta2 followed by the squared twist about delta3.
    """
    delta1, gamma = _basis(form)
    delta2 = delta1
    delta3 = -delta1
    s0 = pl_transform(gamma, delta1, form)
    first = pl_transform(gamma, delta2, form, power=2)
    s1 = pl_transform(first, delta3, form, power=2)
    logger.debug(f"S1 intermediate cycle {first.coordinates}, result {s1.coordinates}")
    return LemmaReport(
        lemma="lemma2",
        pairings={
            "delta1.gamma": form.pair(delta1, gamma),
            "delta2.gamma": form.pair(delta2, gamma),
            "delta3.gamma": form.pair(delta3, gamma),
            "delta2.delta3": form.pair(delta2, delta3),
        },
        cycles={"delta1": delta1.coordinates, "delta2": delta2.coordinates,
                "delta3": delta3.coordinates, "gamma": gamma.coordinates},
        identities=[
            _identity("S0(gamma) = gamma + delta1", gamma + delta1, s0),
            _identity("S0(delta1) = delta1", delta1, pl_transform(delta1, delta1, form)),
            _identity("S1(gamma) = gamma + 2 delta2 - 2 delta3", gamma + 2 * delta2 - 2 * delta3, s1,
                      steps=[("after T_delta2^2", first), ("after T_delta3^2", s1)]),
        ],
    )


def local_monodromy_matrices(form: IntersectionForm = IntersectionForm()) -> Dict[str, SL2Matrix]:
    """Matrices of T4, T-4 and T0 in the (delta1, gamma) basis."""
    delta1, _ = _basis(form)
    delta2 = -delta1
    return {
        "4": pl_matrix(delta1, form),
        "-4": pl_matrix(delta2, form),
        "0": pl_matrix(delta2, form, power=-1) @ pl_matrix(delta1, form, power=-1),
    }


# ----------------------------------------------------------------------
# Branch points and singular fibers

@dataclass(frozen=True)
class BranchPoints:
    lam: complex
    points: Tuple[complex, complex, complex, complex]
    collisions: Tuple[complex, ...]


def discriminant(xi: complex, lam: complex) -> complex:
    """(xi^2 - lambda xi + 1)^2 - 4 xi^2."""
    return (xi * xi - lam * xi + 1) ** 2 - 4 * xi * xi


def branch_points(lam: complex) -> BranchPoints:
    """The four branch points ((lam + 2) +- sqrt(lam^2 + 4 lam))/2, ((lam - 2) +- sqrt(lam^2 - 4 lam))/2."""
    lam = complex(lam)
    plus_root = cmath.sqrt(lam * lam + 4 * lam)
    minus_root = cmath.sqrt(lam * lam - 4 * lam)
    points = (
        ((lam + 2) + plus_root) / 2, ((lam + 2) - plus_root) / 2,
        ((lam - 2) + minus_root) / 2, ((lam - 2) - minus_root) / 2,
    )
    collisions = []
    if abs(plus_root) <= COLLISION_TOL:
        collisions.append((lam + 2) / 2)
    if abs(minus_root) <= COLLISION_TOL:
        collisions.append((lam - 2) / 2)
    if collisions:
        logger.debug(f"Branch points collide at {collisions} for lambda={lam}")
    return BranchPoints(lam, points, tuple(collisions))


def in_congruence_group(m: Union[SL2Matrix, Sequence[int]]) -> bool:
    """
    Membership in Gamma_0(8) intersected with Gamma^0(4): c = 0 mod 8 and b = 0 mod 4.

    Raises:
        ValueError: If the determinant is not 1
    """
    if not isinstance(m, SL2Matrix):
        m = SL2Matrix(*m)
    return m.c % 8 == 0 and m.b % 4 == 0


def fiber_type_of(m: SL2Matrix) -> str:
    """I_n for a nontrivial unipotent m (n = gcd of the entries of m - I)."""
    if m.trace != 2 or m == SL2Matrix.identity():
        return "not unipotent"
    n = gcd(gcd(m.a - 1, m.b), gcd(m.c, m.d - 1))
    return f"I{n}"


def mu_of_lambda(lam: complex) -> complex:
    """Energy map mu = lambda^2/16, sending {0, +-4, inf} to {0, 1, inf}."""
    return lam * lam / 16


SINGULAR_FIBERS: List[Tuple[str, str]] = [("4", "I1"), ("-4", "I1"), ("0", "I2"), ("inf", "I8")]


def singular_fibers() -> List[Tuple[str, str]]:
    return list(SINGULAR_FIBERS)


def euler_number(fibers: Sequence[Tuple[str, str]]) -> int:
    """Sum of n over I_n fibers."""
    total = 0
    for _, kind in fibers:
        if not kind.startswith("I") or not kind[1:].isdigit():
            raise ValueError(f"unsupported fiber type {kind!r}")
        total += int(kind[1:])
    return total
