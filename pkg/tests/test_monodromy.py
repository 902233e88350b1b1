"""
Tests for Picard-Lefschetz monodromy and branch points of the Fermi curve.
"""

import random

import pytest

from spectral_pf.monodromy import (
    CycleVector,
    IntersectionForm,
    SL2Matrix,
    branch_points,
    discriminant,
    euler_number,
    fiber_type_of,
    in_congruence_group,
    local_monodromy_matrices,
    mu_of_lambda,
    pl_matrix,
    pl_transform,
    singular_fibers,
    verify_lemma1,
    verify_lemma2,
)

FORM = IntersectionForm()


def test_intersection_form_is_skew():
    """Test x.y = -y.x and x.x = 0."""
    x, y = CycleVector(2, -1), CycleVector(3, 5)
    assert FORM.pair(x, y) == -FORM.pair(y, x) == 13
    assert FORM.pair(x, x) == 0
    assert IntersectionForm(2).matrix == ((0, 2), (-2, 0))


def test_pl_transform_fixes_vanishing_cycle():
    """Test T_delta(delta) = delta and T_delta(gamma) = gamma + delta."""
    delta, gamma = CycleVector(1, 0), CycleVector(0, 1)
    assert pl_transform(delta, delta, FORM) == delta
    assert pl_transform(gamma, delta, FORM) == CycleVector(1, 1)
    assert pl_transform(gamma, delta, FORM, power=-1) == CycleVector(-1, 1)


def test_pl_matrix_preserves_form():
    """Test twists are symplectic for random cycles."""
    rng = random.Random(7)
    delta = CycleVector(2, 3)
    twist = pl_matrix(delta, FORM)
    for _ in range(20):
        x = CycleVector(rng.randint(-9, 9), rng.randint(-9, 9))
        y = CycleVector(rng.randint(-9, 9), rng.randint(-9, 9))
        assert FORM.pair(twist.apply(x), twist.apply(y)) == FORM.pair(x, y)


def test_lemma1_identities():
    """Test the local monodromies at lambda = 4, -4, 0."""
    report = verify_lemma1()
    assert report.holds
    assert report.pairings == {"delta1.gamma": 1, "delta2.gamma": -1, "delta1.delta2": 0}
    t0 = next(i for i in report.identities if i.name.startswith("T0"))
    assert t0.actual == (-2, 1)
    assert [label for label, _ in t0.steps] == ["after node 1", "after node 2"]


def test_lemma2_identities():
    """Test S0 and S1 of the energy-level family."""
    report = verify_lemma2()
    assert report.holds
    assert report.pairings["delta3.gamma"] == -1
    s1 = next(i for i in report.identities if i.name.startswith("S1"))
    assert s1.expected == (4, 1)


def test_lemmas_require_unit_pairing():
    """Test a non-unimodular form is refused."""
    with pytest.raises(ValueError, match="delta1.gamma = 1"):
        verify_lemma1(IntersectionForm(2))


def test_local_fiber_types():
    """Test T4, T-4 are I1 and T0 is I2."""
    matrices = local_monodromy_matrices()
    assert matrices["4"].rows() == [[1, 1], [0, 1]]
    assert fiber_type_of(matrices["4"]) == "I1"
    assert fiber_type_of(matrices["-4"]) == "I1"
    assert matrices["0"].rows() == [[1, -2], [0, 1]]
    assert fiber_type_of(matrices["0"]) == "I2"


def test_fiber_type_of_non_unipotent():
    """Test identity and hyperbolic matrices."""
    assert fiber_type_of(SL2Matrix.identity()) == "not unipotent"
    assert fiber_type_of(SL2Matrix(2, 1, 1, 1)) == "not unipotent"
    assert fiber_type_of(SL2Matrix(1, 0, 8, 1)) == "I8"


def test_sl2_matrix_algebra():
    """Test determinant check, inverse and conjugation."""
    with pytest.raises(ValueError, match="determinant"):
        SL2Matrix(1, 1, 1, 1)
    m = SL2Matrix(2, 1, 1, 1)
    assert m @ m.inverse() == SL2Matrix.identity()
    twist = SL2Matrix(1, 4, 0, 1)
    assert twist.conjugate(m).trace == 2


def test_euler_number_is_twelve():
    """Test 1 + 1 + 2 + 8 = 12 for the rational elliptic surface."""
    fibers = singular_fibers()
    assert euler_number(fibers) == 12
    assert ("inf", "I8") in fibers
    with pytest.raises(ValueError, match="unsupported"):
        euler_number([("0", "II")])


def test_congruence_group_membership():
    """Test c = 0 mod 8 and b = 0 mod 4."""
    assert in_congruence_group(SL2Matrix(1, 4, 0, 1))
    assert in_congruence_group((1, 0, 8, 1))
    assert in_congruence_group((5, 4, 16, 13))
    assert not in_congruence_group((1, 1, 0, 1))
    assert not in_congruence_group((1, 0, 4, 1))
    with pytest.raises(ValueError):
        in_congruence_group((1, 1, 1, 1))


def test_congruence_group_closed_under_products():
    """Test random words in the generators stay in the group."""
    rng = random.Random(11)
    generators = [SL2Matrix(1, 4, 0, 1), SL2Matrix(1, 0, 8, 1), SL2Matrix(-1, 0, 0, -1)]
    generators += [g.inverse() for g in generators]
    for _ in range(50):
        product = SL2Matrix.identity()
        for _ in range(rng.randint(1, 8)):
            product = product @ rng.choice(generators)
        assert in_congruence_group(product)


@pytest.mark.parametrize("lam,expected", [(4, [1]), (-4, [-1]), (0, [1, -1])])
def test_branch_point_collisions(lam, expected):
    """Test the branch points collide exactly at the singular energies."""
    result = branch_points(lam)
    assert [c.real for c in result.collisions] == pytest.approx(expected)


def test_branch_points_are_discriminant_roots():
    """Test each branch point is a root of the discriminant."""
    lam = 1.3 + 0.2j
    result = branch_points(lam)
    assert not result.collisions
    for point in result.points:
        assert abs(discriminant(point, lam)) < 1e-10 * max(1.0, abs(point)) ** 4


def test_mu_of_lambda():
    """Test mu sends 0, 4, -4 to 0, 1, 1."""
    assert mu_of_lambda(0) == 0
    assert mu_of_lambda(4) == 1
    assert mu_of_lambda(-4) == 1


def random_sl2(rng, length=6):
    generators = [SL2Matrix(1, 1, 0, 1), SL2Matrix(1, -1, 0, 1), SL2Matrix(0, -1, 1, 0)]
    product = SL2Matrix.identity()
    for _ in range(rng.randint(1, length)):
        product = product @ rng.choice(generators)
    return product


def test_fiber_type_conjugation_invariant():
    """Test fiber_type_of is unchanged by 100 random integer conjugations."""
    rng = random.Random(5)
    samples = [SL2Matrix(1, 1, 0, 1), SL2Matrix(1, -2, 0, 1), SL2Matrix(1, 8, 0, 1),
               SL2Matrix(1, 0, 3, 1), SL2Matrix(2, 1, 1, 1), SL2Matrix(-1, 4, 0, -1)]
    for _ in range(100):
        g = random_sl2(rng)
        for m in samples:
            assert fiber_type_of(m.conjugate(g)) == fiber_type_of(m)


def test_conjugated_eight_twist_is_i8():
    """Test [[1, 8], [0, 1]] conjugated by [[2, 1], [1, 1]] is still I8."""
    m = SL2Matrix(1, 8, 0, 1)
    conjugated = m.conjugate(SL2Matrix(2, 1, 1, 1))
    assert conjugated != m
    assert conjugated.trace == 2
    assert fiber_type_of(conjugated) == "I8"
