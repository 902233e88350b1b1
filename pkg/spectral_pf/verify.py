"""
Acceptance suite: every exact series, identity and numeric oracle of the
pipeline, grouped so that a single group can be run on its own.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional
import logging
import math
import random

from spectral_pf.elliptic import ellip_K, landen, legendre_relation, quotient_law
from spectral_pf.exactseries import ExactSeries
from spectral_pf.fermi import (
    bloch_eval,
    butterfly,
    fiber_classify,
    reduced_coordinates,
    spectrum_slice,
)
from spectral_pf.mirrormap import (
    MIN_MIRROR_ORDER,
    MirrorData,
    build_mirror,
    compare_printed_coefficient,
    epsilon_of_sqrtq,
    epsilon_schwarzian_rhs,
    frobenius_closed_form,
    instanton_numbers,
    printed_epsilon_coefficients,
    rescaled_epsilon_series,
    schwarzian_crosscheck,
)
from spectral_pf.modular import (
    dos_report,
    epsilon_sq_qexp,
    j_from_hauptmodul,
    j_lambda_function,
    j_second_relation,
    lambda_qexp,
    lambert_coefficient_series,
    theta_fourth,
    weight_one_residual,
)
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
    pl_transform,
    singular_fibers,
    verify_lemma1,
    verify_lemma2,
)
from spectral_pf.ode import (
    apply_ode,
    dos_equation,
    dos_equation_from_quarter_period,
    epsilon_equation,
    epsilon_theta_form,
    frobenius_solutions,
    from_theta_form,
    indicial_equation,
    mobius_pullback,
    q_form,
    theta_form,
)
from spectral_pf.ratfun import RationalFunction
from spectral_pf.schema import BlochIndex, CheckResult, DOSParams, FluxRational, VerificationReport

logger = logging.getLogger(__name__)

GROUPS = ("series", "ode", "mirror", "modular", "elliptic", "monodromy", "fermi", "instantons")

CLOSED_FORM_MAX = 30
INSTANTON_MAX = 20
BUTTERFLY_Q_MAX = 20
SPECTRUM_TOL = 1e-9
DOS_EPSILONS = (0.2, 0.5, 0.8)
DOS_TOL = 1e-10
ELLIPTIC_GRID = tuple(i / 10 for i in range(1, 10))
SEED = 20240601


@dataclass
class SuiteContext:
    """Parameters shared by every check of one run; the mirror data is built once."""

    order: int = 40
    float_tol: float = 1e-12
    a: int = 2
    b: int = 3
    grid: int = 16
    gap_threshold: float = 1e-6
    workers: int = 4

    @cached_property
    def mirror(self) -> MirrorData:
        return build_mirror(self.order)


def _check(group: str, name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(group=group, name=name, status="pass" if ok else "fail", detail=detail)


def _mismatches(pairs: Iterable) -> List:
    return [label for label, computed, expected in pairs if computed != expected]


# ----------------------------------------------------------------------
# Groups

def check_series(ctx: SuiteContext) -> List[CheckResult]:
    group = "series"
    d1, d2 = frobenius_solutions(dos_equation(), ctx.order)
    g = d2.analytic_part
    top = min(CLOSED_FORM_MAX, ctx.order)
    bad_d = _mismatches((n, d1.coefficient(n), frobenius_closed_form(n)[0]) for n in range(top + 1))
    bad_c = _mismatches((n, g.coefficient(n), frobenius_closed_form(n)[1]) for n in range(2, top + 1))
    spots = [(2, d1.coefficient(2), Fraction(1, 4)), (4, d1.coefficient(4), Fraction(9, 64)),
             (4, g.coefficient(4), Fraction(21, 128))]

    x = ExactSeries.monomial(1, "x", ctx.order)
    geometric = ExactSeries.geometric(1, "x", ctx.order)
    sine_like = x - x ** 3 / 6 + x ** 5 / 120
    return [
        _check(group, f"d_0..d_{top} match the closed form", not bad_d, f"mismatch at {bad_d}"),
        _check(group, f"c_2..c_{top} match the closed form", not bad_c, f"mismatch at {bad_c}"),
        _check(group, "spot values d2, d4, c4", not _mismatches(spots)),
        _check(group, "(1 - x) * sum x^n = 1", ((1 - x) * geometric) == ExactSeries.one("x", ctx.order)),
        _check(group, "log(exp(x)) = x", x.exp().log() == x),
        _check(group, "reverse composes to the identity",
               sine_like.compose(sine_like.reverse()) == x),
    ]


def check_ode(ctx: SuiteContext) -> List[CheckResult]:
    group = "ode"
    ode = dos_equation()
    d1, d2 = frobenius_solutions(ode, ctx.order)
    residual_d1 = apply_ode(ode, d1)
    residual_d2 = apply_ode(ode, d2)
    control = apply_ode(ode, d1 + ExactSeries.monomial(7, "k", ctx.order))
    expected_q = RationalFunction.from_expr("(1 + k**2)**2/(4*k**2*(1 - k**2)**2)", "k")
    pulled = mobius_pullback(ode, -1, 1, 1, 1, variable="epsilon", name="epsilon")
    indicial = indicial_equation(ode)
    return [
        _check(group, "indicial equation has the double root 0", indicial.is_double_zero,
               str(indicial)),
        _check(group, f"L(D1) = 0 through order {residual_d1.order}", residual_d1.is_zero()),
        _check(group, f"L(D2) = 0 through order {residual_d2.order}", residual_d2.is_zero()),
        _check(group, "L(D1 + k^7) != 0", not control.is_zero()),
        _check(group, "Q-form is (1+k^2)^2/(4k^2(1-k^2)^2)", q_form(ode) == expected_q,
               str(q_form(ode))),
        _check(group, "k = (1-eps)/(1+eps) gives the eps-equation", pulled == epsilon_equation(),
               str(pulled)),
        _check(group, "Theta-form of the eps-equation", from_theta_form(epsilon_theta_form()) == epsilon_equation()),
        _check(group, "Theta-form round trip", from_theta_form(theta_form(ode)) == ode),
        _check(group, "D = (1+k) K gauge gives the DOS equation",
               dos_equation_from_quarter_period() == ode),
    ]


def check_mirror(ctx: SuiteContext) -> List[CheckResult]:
    group = "mirror"
    mirror = ctx.mirror
    q_expected = {1: Fraction(1), 3: Fraction(1, 4), 5: Fraction(17, 128), 7: Fraction(45, 512)}
    k_expected = {1: Fraction(1), 3: Fraction(-1, 4), 5: Fraction(7, 128), 7: Fraction(-5, 512)}
    q_bad = _mismatches((n, mirror.q_of_k.coefficient(n), q_expected.get(n, 0)) for n in range(8))
    k_bad = _mismatches((n, mirror.k_of_q.coefficient(n), k_expected.get(n, 0)) for n in range(8))
    identity = ExactSeries.monomial(1, "Q", mirror.order)
    round_trip = mirror.q_of_k.compose(mirror.k_of_q)
    printed = printed_epsilon_coefficients()
    eps_bad = _mismatches((n, mirror.eps_of_q.coefficient(n), printed[n]) for n in range(6))

    results = [
        _check(group, "Q(k) = k + k^3/4 + 17k^5/128 + 45k^7/512", not q_bad, f"mismatch at {q_bad}"),
        _check(group, "k(Q) = Q - Q^3/4 + 7Q^5/128 - 5Q^7/512", not k_bad, f"mismatch at {k_bad}"),
        _check(group, f"Q(k(Q)) = Q through order {mirror.order}", round_trip == identity),
        _check(group, "eps(Q) through Q^5", not eps_bad, f"mismatch at {eps_bad}"),
        _check(group, "rescaled form 1 - 8 sum c_n (Q/4)^n", rescaled_epsilon_series() == mirror.eps_of_q),
    ]

    comparison = compare_printed_coefficient(mirror, 6)
    results.append(CheckResult(
        group=group,
        name="eps(Q) coefficient of Q^6 against the printed value",
        status="pass" if comparison.agrees else "flag",
        detail=f"computed {comparison.computed}, printed {comparison.printed}",
    ))

    report = schwarzian_crosscheck(max(ctx.order, 12))
    results.append(_check(group, f"{{t, k}} = 2Q through k^{report.laurent_order}", report.agrees,
                          f"agrees through k^{report.agreement_order}"))
    eps_report = epsilon_schwarzian_rhs(mirror.order, mirror)
    results.append(_check(group, "Schwarzian equation of eps(t)", eps_report.agrees,
                          f"agrees through Q^{eps_report.agreement_order} of Q^{eps_report.laurent_order}"))
    return results


def check_modular(ctx: SuiteContext) -> List[CheckResult]:
    group = "modular"
    order = max(ctx.order, MIN_MIRROR_ORDER)
    eps = epsilon_of_sqrtq(order, ctx.mirror)
    eps_sq = eps * eps
    printed = 1 - 16 * ExactSeries.from_dict({1: 1, 2: -8, 3: 44, 4: -192, 5: 718}, "s", 5)
    theta3 = theta_fourth(3, 5)
    lam = lambda_qexp(6)
    j = j_from_hauptmodul(4)
    lhs, rhs = j_second_relation(0.03)
    residual = weight_one_residual(0.3)
    return [
        _check(group, "eps^2 = 1 - 16(s - 8s^2 + 44s^3 - 192s^4 + 718s^5)", eps_sq == printed),
        _check(group, f"eps^2 = 1 - lambda(s) through s^{order}", eps_sq == epsilon_sq_qexp(order)),
        _check(group, "theta3^4 = 1 + 8q + 24q^2 + 32q^3 + 24q^4 + 48q^5",
               theta3.dense(0, 5) == [1, 8, 24, 32, 24, 48]),
        _check(group, "lambda = 16q - 128q^2 + 704q^3 - 3072q^4 + 11488q^5 - 38400q^6",
               lam.dense(0, 6) == [0, 16, -128, 704, -3072, 11488, -38400]),
        _check(group, "theta3^4 = theta2^4 + theta4^4",
               theta_fourth(3, ctx.order) == theta_fourth(2, ctx.order) + theta_fourth(4, ctx.order)),
        _check(group, "theta3(s)^2 as a Lambert series",
               lambert_coefficient_series(ctx.order) ** 2 == theta_fourth(3, ctx.order, "s")),
        _check(group, "j = q^-2 + 744 + 196884 q^2",
               j.dense(-2, 4) == [1, 0, 744, 0, 196884, 0, 21493760]),
        _check(group, "j(lambda = 1/2) = 1728", j_lambda_function().evaluate(Fraction(1, 2)) == 1728),
        _check(group, "doubled-argument j relation", abs(lhs - rhs) <= 1e-9 * abs(rhs),
               f"lhs={lhs!r}, rhs={rhs!r}"),
        _check(group, "K(k1) = (pi/2) theta3(q1)^2", abs(residual) <= ctx.float_tol,
               f"residual {residual:.3e}"),
    ]


def check_elliptic(ctx: SuiteContext) -> List[CheckResult]:
    group = "elliptic"
    legendre = max(abs(legendre_relation(k)) for k in ELLIPTIC_GRID)
    landen_err = max(
        abs((1 + k) * ellip_K(k) - ellip_K(landen(k))) / ellip_K(landen(k)) for k in ELLIPTIC_GRID
    )
    quotient_err = max(abs(x - y) for x, y in (quotient_law(k) for k in ELLIPTIC_GRID))
    results = [
        _check(group, "Legendre relation on a 9-point grid", legendre <= ctx.float_tol,
               f"max residual {legendre:.3e}"),
        _check(group, "(1+k) K(k) = K(2 sqrt(k)/(1+k))", landen_err <= ctx.float_tol,
               f"max relative error {landen_err:.3e}"),
        _check(group, "Landen quotient law K'/K = 2 K1'/K1", quotient_err <= 1e-10,
               f"max error {quotient_err:.3e}"),
    ]
    for epsilon in DOS_EPSILONS:
        report = dos_report(DOSParams(epsilon=epsilon, a=ctx.a, b=ctx.b))
        results.append(_check(group, f"DOS oracles agree at eps={epsilon}",
                              report.max_deviation <= DOS_TOL,
                              f"max deviation {report.max_deviation:.3e}"))
    top = dos_report(DOSParams(epsilon=1.0, a=ctx.a, b=ctx.b))
    expected = 1.0 / (4.0 * math.pi * ctx.a * ctx.b)
    results.append(_check(group, "DOS at eps=1 is 1/(4 pi a b)",
                          abs(top.direct - expected) <= ctx.float_tol and top.max_deviation <= ctx.float_tol,
                          f"{top.direct!r}"))
    return results


def _random_congruence_products(rng: random.Random, count: int) -> List[SL2Matrix]:
    generators = [SL2Matrix(1, 4, 0, 1), SL2Matrix(1, 0, 8, 1), SL2Matrix(-1, 0, 0, -1),
                  SL2Matrix(5, 4, 16, 13)]
    generators += [g.inverse() for g in generators]
    products = []
    for _ in range(count):
        product = SL2Matrix.identity()
        for _ in range(rng.randint(1, 6)):
            product = product @ rng.choice(generators)
        products.append(product)
    return products


def check_monodromy(ctx: SuiteContext) -> List[CheckResult]:
    group = "monodromy"
    form = IntersectionForm()
    rng = random.Random(SEED)
    results = []
    for report in (verify_lemma1(form), verify_lemma2(form)):
        for identity in report.identities:
            results.append(_check(group, f"{report.lemma}: {identity.name}", identity.holds,
                                  f"got {identity.actual}"))

    cycles = [CycleVector(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(12)]
    preserved = all(
        form.pair(pl_transform(x, delta, form), pl_transform(y, delta, form)) == form.pair(x, y)
        for delta, x, y in zip(cycles[::3], cycles[1::3], cycles[2::3])
    )
    results.append(_check(group, "Picard-Lefschetz maps preserve the pairing", preserved))

    kinds = {key: fiber_type_of(m) for key, m in local_monodromy_matrices(form).items()}
    results.append(_check(group, "local monodromies are I1, I1, I2",
                          kinds == {"4": "I1", "-4": "I1", "0": "I2"}, str(kinds)))
    results.append(_check(group, "Euler number of I1 + I1 + I2 + I8 is 12",
                          euler_number(singular_fibers()) == 12))

    products = _random_congruence_products(rng, 100)
    results.append(_check(group, "congruence subgroup closed under 100 random products",
                          all(in_congruence_group(m) for m in products)))
    results.append(_check(group, "[[1, 1], [0, 1]] lies outside the subgroup",
                          not in_congruence_group(SL2Matrix(1, 1, 0, 1))))

    def collided(lam: float) -> List[float]:
        return sorted(round(c.real, 9) for c in branch_points(lam).collisions)

    results.append(_check(group, "branch point collisions at lambda = 4, -4, 0",
                          collided(4) == [1.0] and collided(-4) == [-1.0] and collided(0) == [-1.0, 1.0]))
    worst = 0.0
    for _ in range(10):
        lam = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        for xi in branch_points(lam).points:
            worst = max(worst, abs(discriminant(xi, lam)) / max(1.0, abs(xi)) ** 4)
    results.append(_check(group, "discriminant vanishes at the branch points", worst <= ctx.float_tol,
                          f"max scaled residual {worst:.3e}"))
    results.append(_check(group, "mu = lambda^2/16 sends 0, +-4 to 0, 1",
                          mu_of_lambda(0) == 0 and mu_of_lambda(4) == 1 and mu_of_lambda(-4) == 1))
    return results


def _symmetric(intervals, tol: float) -> bool:
    mirrored = [(-hi, -lo) for lo, hi in reversed(intervals)]
    return len(mirrored) == len(intervals) and all(
        abs(x[0] - y[0]) <= tol and abs(x[1] - y[1]) <= tol for x, y in zip(intervals, mirrored)
    )


def check_fermi(ctx: SuiteContext) -> List[CheckResult]:
    group = "fermi"
    rng = random.Random(SEED)
    free = spectrum_slice(FluxRational(p=0, q=1), ctx.grid, ctx.gap_threshold).intervals
    half = spectrum_slice(FluxRational(p=1, q=2), ctx.grid, ctx.gap_threshold).intervals
    third = spectrum_slice(FluxRational(p=1, q=3), ctx.grid, ctx.gap_threshold).intervals
    edge = 2.0 * math.sqrt(2.0)
    slices = butterfly(BUTTERFLY_Q_MAX, ctx.grid, ctx.gap_threshold, ctx.workers)
    bounded = all(-4 - SPECTRUM_TOL <= lo and hi <= 4 + SPECTRUM_TOL for s in slices for lo, hi in s.intervals)
    symmetric = all(_symmetric(s.intervals, SPECTRUM_TOL) for s in slices)

    reduction_err = 0.0
    for _ in range(10):
        idx = BlochIndex(k=rng.randint(-3, 3), l=rng.randint(-3, 3), m=rng.randrange(ctx.a),
                         n=rng.randrange(ctx.b), alpha=rng.random(), beta=rng.random(), a=ctx.a, b=ctx.b)
        xi1 = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        xi2 = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        xi, eta = reduced_coordinates(idx, xi1, xi2)
        reduction_err = max(reduction_err, abs(bloch_eval(idx, xi1, xi2) - (xi + 1 / xi + eta + 1 / eta)))

    node = fiber_classify(4)
    lines = fiber_classify(0)
    generic = fiber_classify(complex(2, 1))
    return [
        _check(group, "flux 0/1 spectrum is [-4, 4]",
               len(free) == 1 and abs(free[0][0] + 4) <= SPECTRUM_TOL and abs(free[0][1] - 4) <= SPECTRUM_TOL,
               str(free)),
        _check(group, "flux 1/2 spectrum is [-2 sqrt 2, 2 sqrt 2]",
               len(half) == 1 and abs(half[0][0] + edge) <= SPECTRUM_TOL and abs(half[0][1] - edge) <= SPECTRUM_TOL,
               str(half)),
        _check(group, "flux 1/3 has 3 bands", len(third) == 3, str(third)),
        _check(group, f"slices with q <= {BUTTERFLY_Q_MAX} lie in [-4, 4]", bounded),
        _check(group, f"slices with q <= {BUTTERFLY_Q_MAX} are symmetric under negation", symmetric),
        _check(group, "Bloch components reduce to xi + 1/xi + eta + 1/eta", reduction_err <= 1e-13,
               f"max error {reduction_err:.3e}"),
        _check(group, "lambda = 4 has a node at (1, 1)",
               node.kind == "I1" and node.singular_points[0][0].re == 1 and node.singular_points[0][1].re == 1),
        _check(group, "lambda = 0 splits into two lines", lines.kind == "I2" and len(lines.components) == 2),
        _check(group, "lambda = 2 + i is generic with 4 distinct branch points",
               generic.kind == "generic" and not generic.collisions),
    ]


def check_instantons(ctx: SuiteContext) -> List[CheckResult]:
    group = "instantons"
    d_max = min(INSTANTON_MAX, ctx.order)
    eps = epsilon_of_sqrtq(max(ctx.order, MIN_MIRROR_ORDER), ctx.mirror)
    try:
        table = instanton_numbers(eps, d_max)
    except ArithmeticError as e:
        return [_check(group, f"n_1..n_{d_max} are integers", False, str(e))]
    numbers = table.numbers
    return [
        _check(group, f"n_1..n_{d_max} are integers", True),
        _check(group, "n_1 = -8, n_2 = 40, n_3 = -88",
               (numbers[1], numbers[2], numbers[3]) == (-8, 40, -88),
               f"got {numbers[1]}, {numbers[2]}, {numbers[3]}"),
    ]


CHECKS: Dict[str, Callable[[SuiteContext], List[CheckResult]]] = {
    "series": check_series,
    "ode": check_ode,
    "mirror": check_mirror,
    "modular": check_modular,
    "elliptic": check_elliptic,
    "monodromy": check_monodromy,
    "fermi": check_fermi,
    "instantons": check_instantons,
}


def run_group(name: str, ctx: SuiteContext) -> List[CheckResult]:
    """Run one group; an exception inside it becomes a single failed check."""
    if name not in CHECKS:
        raise ValueError(f"unknown verification group {name!r}; choose from {', '.join(GROUPS)}")
    try:
        results = CHECKS[name](ctx)
    except Exception as e:
        logger.error(f"Verification group {name} crashed: {e}")
        return [CheckResult(group=name, name=f"{name} group ran", status="fail", detail=repr(e))]
    for result in results:
        if result.status == "fail":
            logger.error(f"Check failed: [{name}] {result.name} {result.detail}")
        elif result.status == "flag":
            logger.warning(f"Check flagged: [{name}] {result.name} {result.detail}")
    return results


def run_verification(groups: Optional[Iterable[str]] = None, order: int = 40,
                     **options) -> VerificationReport:
    """
    Run the acceptance suite.

    Args:
        groups: Group names to run (all when omitted)
        order: Series truncation order; values below 8 are lifted to 8
        **options: float_tol, a, b, grid, gap_threshold, workers

    Returns:
        VerificationReport with one CheckResult per check
    """
    if order < MIN_MIRROR_ORDER:
        logger.warning(f"Verification order {order} lifted to {MIN_MIRROR_ORDER}")
        order = MIN_MIRROR_ORDER
    selected = list(groups) if groups else list(GROUPS)
    ctx = SuiteContext(order=order, **options)
    report = VerificationReport(order=order)
    for name in selected:
        logger.info(f"Running verification group {name}")
        report.checks.extend(run_group(name, ctx))
    logger.info(
        f"Verification finished: {report.passed} passed, {report.failed} failed, {report.flagged} flagged"
    )
    return report
