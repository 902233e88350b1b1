"""
Command-line front end: configuration, subcommands and output emission.

stdout carries command output only (json, csv or text); logs go to stderr.
Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""

import argparse
import csv
import io
import json
import logging
import sys
from math import gcd
from typing import Any, Dict, List, Literal, Optional, Sequence

from dotenv import dotenv_values, load_dotenv
from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings

from spectral_pf.exactseries import ExactSeries, LogPair
from spectral_pf.fermi import butterfly, butterfly_rows, fiber_classify
from spectral_pf.mirrormap import MIN_MIRROR_ORDER, build_mirror, epsilon_of_sqrtq, instanton_numbers
from spectral_pf.modular import dos_report, epsilon_sq_qexp, lambda_qexp, theta_fourth
from spectral_pf.monodromy import (
    euler_number,
    fiber_type_of,
    local_monodromy_matrices,
    singular_fibers,
    verify_lemma1,
    verify_lemma2,
)
from spectral_pf.ode import (
    NAMED_EQUATIONS,
    dos_equation,
    frobenius_solutions,
    indicial_equation,
    mobius_pullback,
    q_form,
    theta_form,
)
from spectral_pf.schema import DOSParams, ode_to_payload, ratfun_to_payload, series_to_payload
from spectral_pf.storage import get_failed_checks, get_run, init_db, list_runs, save_run
from spectral_pf.utils import parse_fraction, setup_logging
from spectral_pf.verify import GROUPS, run_verification

logger = logging.getLogger(__name__)

ENV_PREFIX = "SPECTRAL_PF_"
SERIES_NAMES = (
    "D1", "D2", "mirror", "mirror-inverse", "epsilon-of-Q", "epsilon-sqrt-q",
    "epsilon-sq-q", "lambda-q", "theta2_4", "theta3_4", "theta4_4",
)
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class Settings(BaseSettings):
    """Run configuration from flags, a --config file, the environment and defaults."""

    order: int = Field(40, ge=8)
    float_tol: float = Field(1e-12, gt=0, le=1e-6)
    output: Literal["json", "csv", "text"] = "json"
    a: int = Field(2, ge=1)
    b: int = Field(3, ge=1)
    grid: int = Field(16, ge=4)
    gap_threshold: float = Field(1e-6, ge=0)
    workers: int = Field(4, ge=1)
    log_level: str = "WARNING"
    db_path: str = "sqlite:///./spectral_pf.db"

    class Config:
        env_prefix = ENV_PREFIX
        env_file = ".env"
        case_sensitive = False

    @model_validator(mode="after")
    def periods_coprime(self) -> "Settings":
        if gcd(self.a, self.b) != 1:
            raise ValueError(f"periods a={self.a} and b={self.b} must be coprime")
        return self


def read_config_file(path: str) -> Dict[str, str]:
    """
    key=value pairs from a config file; keys may carry the SPECTRAL_PF_ prefix.

    Raises:
        ValueError: If the file does not exist
    """
    try:
        with open(path, encoding="utf-8") as handle:
            raw = dotenv_values(stream=handle)
    except OSError as e:
        raise ValueError(f"Cannot read config file {path}: {e}") from e
    values = {}
    for key, value in raw.items():
        if value is None:
            continue
        name = key.lower()
        if name.startswith(ENV_PREFIX.lower()):
            name = name[len(ENV_PREFIX):]
        values[name] = value
    return values


def load_settings(config_path: Optional[str] = None, **overrides: Any) -> Settings:
    """Flags beat the config file, which beats environment and defaults."""
    values: Dict[str, Any] = read_config_file(config_path) if config_path else {}
    values.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**values)


# ----------------------------------------------------------------------
# Emission

def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False)


def _csv(rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue().rstrip("\n")


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _series_rows(series: ExactSeries) -> List[Dict[str, Any]]:
    payload = series_to_payload(series)
    return [
        {"variable": payload.variable, "exponent": payload.valuation + i, "coefficient": c}
        for i, c in enumerate(payload.coefficients)
    ]


# ----------------------------------------------------------------------
# Commands

def cmd_dos(args: argparse.Namespace, settings: Settings) -> int:
    params = DOSParams(epsilon=args.epsilon, a=settings.a, b=settings.b)
    report = dos_report(params)
    logger.info(f"DOS at eps={params.epsilon}: deviation {report.max_deviation:.3e}")
    if settings.output == "json":
        _emit(_dumps(report.model_dump(mode="json")))
    elif settings.output == "csv":
        data = report.model_dump(mode="json")
        _emit(_csv([data], list(data)))
    else:
        _emit(
            f"eps = {report.epsilon!r}  (a = {report.a}, b = {report.b}, k = {report.modulus!r})\n"
            f"direct          {report.direct!r}\n"
            f"landen          {report.landen!r}\n"
            f"hypergeometric  {report.hypergeometric!r}\n"
            f"lambert         {report.lambert!r}  (tail <= {report.lambert_tail_bound:.3e})\n"
            f"max deviation   {report.max_deviation:.3e}"
        )
    return EXIT_OK


def build_named_series(name: str, order: int):
    """
    The named series truncated at ``order``; D2 comes back as a LogPair.

    Raises:
        ValueError: If the name is unknown or order is negative
    """
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    if name in ("D1", "D2"):
        d1, d2 = frobenius_solutions(dos_equation(), max(order, 1))
        if name == "D1":
            return d1.truncate(order)
        return LogPair(d2.log_part.truncate(order), d2.analytic_part.truncate(order))
    if name in ("mirror", "mirror-inverse", "epsilon-of-Q", "epsilon-sqrt-q"):
        mirror = build_mirror(max(order, MIN_MIRROR_ORDER))
        if name == "mirror":
            return mirror.q_of_k.truncate(order)
        if name == "mirror-inverse":
            return mirror.k_of_q.truncate(order)
        if name == "epsilon-of-Q":
            return mirror.eps_of_q.truncate(order)
        return epsilon_of_sqrtq(max(order, MIN_MIRROR_ORDER), mirror).truncate(order)
    if name == "epsilon-sq-q":
        return epsilon_sq_qexp(max(order, 2)).truncate(order)
    if name == "lambda-q":
        return lambda_qexp(max(order, 1)).truncate(order)
    if name in ("theta2_4", "theta3_4", "theta4_4"):
        return theta_fourth(int(name[5]), max(order, 1)).truncate(order)
    raise ValueError(f"unknown series {name!r}; choose from {', '.join(SERIES_NAMES)}")


def cmd_series(args: argparse.Namespace, settings: Settings) -> int:
    order = settings.order if args.order is None else args.order
    series = build_named_series(args.name, order)
    if isinstance(series, ExactSeries):
        parts = {args.name: series}
    else:
        parts = {"log_part": series.log_part, "analytic_part": series.analytic_part}

    if settings.output == "json":
        payloads = {key: series_to_payload(value).model_dump(mode="json") for key, value in parts.items()}
        _emit(_dumps(payloads[args.name] if args.name in payloads else payloads))
    elif settings.output == "csv":
        rows = [dict(part=key, **row) for key, value in parts.items() for row in _series_rows(value)]
        _emit(_csv(rows, ["part", "variable", "exponent", "coefficient"]))
    else:
        _emit("\n".join(f"{key}: {value}" for key, value in parts.items()))
    return EXIT_OK


def build_named_ode(name: str, pullback: Optional[Sequence[str]] = None, variable: Optional[str] = None):
    """
    A named equation, optionally pulled back along x = (a t + b)/(c t + d).

    Raises:
        ValueError: If the name is unknown or the map is degenerate or inexact
    """
    if name not in NAMED_EQUATIONS:
        raise ValueError(f"unknown equation {name!r}; choose from {', '.join(NAMED_EQUATIONS)}")
    ode = NAMED_EQUATIONS[name]()
    if pullback:
        a, b, c, d = (parse_fraction(value) for value in pullback)
        ode = mobius_pullback(ode, a, b, c, d, variable=variable, name=f"{name}-pullback")
    return ode


def cmd_ode(args: argparse.Namespace, settings: Settings) -> int:
    ode = build_named_ode(args.name, args.pullback, args.variable)
    q = q_form(ode)
    form = theta_form(ode)
    try:
        indicial = indicial_equation(ode)
    except ValueError as e:
        logger.warning(f"No indicial equation for {ode.name}: {e}")
        indicial = None

    if settings.output == "json":
        payload = ode_to_payload(ode).model_dump(mode="json")
        payload.update({
            "name": ode.name,
            "q_form": ratfun_to_payload(q).model_dump(mode="json"),
            "theta_form": {
                key: ratfun_to_payload(value).model_dump(mode="json")
                for key, value in (("theta2", form.theta2), ("theta1", form.theta1),
                                   ("theta0", form.theta0))
            },
            "indicial_roots": None if indicial is None else indicial.roots,
        })
        _emit(_dumps(payload))
    elif settings.output == "csv":
        payload = ode_to_payload(ode)
        rows = [
            {"part": part, "side": side, "degree": degree, "coefficient": value}
            for part, function in (("p", payload.p), ("r", payload.r))
            for side, values in (("num", function.num), ("den", function.den))
            for degree, value in enumerate(values)
        ]
        _emit(_csv(rows, ["part", "side", "degree", "coefficient"]))
    else:
        lines = [str(ode), f"Q = {q}", f"Theta form: {form}"]
        if indicial is not None:
            lines.append(f"indicial: {indicial}")
        _emit("\n".join(lines))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    groups = None if args.all or not args.group else args.group
    order = settings.order if args.order is None else args.order
    report = run_verification(
        groups, order,
        float_tol=settings.float_tol, a=settings.a, b=settings.b, grid=settings.grid,
        gap_threshold=settings.gap_threshold, workers=settings.workers,
    )
    if args.record:
        init_db(settings.db_path)
        run_id = save_run(report)
        logger.info(f"Recorded verification run {run_id}")

    if settings.output == "json":
        _emit(_dumps(report.model_dump(mode="json", exclude={"started_at"}) | {
            "passed": report.passed, "failed": report.failed, "flagged": report.flagged,
        }))
    elif settings.output == "csv":
        rows = [check.model_dump() for check in report.checks]
        _emit(_csv(rows, ["group", "name", "status", "detail"]))
    else:
        lines = [f"{check.status.upper():4}  [{check.group}] {check.name}"
                 + (f"  ({check.detail})" if check.detail and check.status != "pass" else "")
                 for check in report.checks]
        lines.append(f"{report.passed} passed, {report.failed} failed, {report.flagged} flagged")
        _emit("\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_butterfly(args: argparse.Namespace, settings: Settings) -> int:
    slices = butterfly(args.q_max, settings.grid, settings.gap_threshold, settings.workers)
    rows = butterfly_rows(slices)
    columns = ["p", "q", "band_index", "lo", "hi"]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(_csv(rows, columns) + "\n")
        logger.info(f"Wrote {len(rows)} bands for {len(slices)} fluxes to {args.out}")
        return EXIT_OK
    if settings.output == "json":
        _emit(_dumps([s.model_dump(mode="json") for s in slices]))
    elif settings.output == "csv":
        _emit(_csv(rows, columns))
    else:
        _emit("\n".join(
            f"{s.flux}: " + ", ".join(f"[{lo:.6f}, {hi:.6f}]" for lo, hi in s.intervals) for s in slices
        ))
    return EXIT_OK


def cmd_monodromy(args: argparse.Namespace, settings: Settings) -> int:
    reports = [verify_lemma1(), verify_lemma2()]
    matrices = local_monodromy_matrices()
    fibers = singular_fibers()
    if settings.output == "json":
        _emit(_dumps({
            "lemmas": [report.model_dump(mode="json") for report in reports],
            "local_monodromy": {key: {"matrix": m.rows(), "fiber": fiber_type_of(m)}
                                for key, m in matrices.items()},
            "singular_fibers": [{"lambda": lam, "type": kind} for lam, kind in fibers],
            "euler_number": euler_number(fibers),
        }))
    elif settings.output == "csv":
        rows = [{"lemma": report.lemma, "identity": identity.name, "holds": identity.holds}
                for report in reports for identity in report.identities]
        _emit(_csv(rows, ["lemma", "identity", "holds"]))
    else:
        lines = []
        for report in reports:
            lines.append(f"{report.lemma}: {'holds' if report.holds else 'FAILS'}")
            lines.extend(f"  {identity.name}: {identity.actual}" for identity in report.identities)
        for key, m in matrices.items():
            lines.append(f"T{key} = {m.rows()}  ({fiber_type_of(m)})")
        lines.append(f"singular fibers {fibers}, Euler number {euler_number(fibers)}")
        _emit("\n".join(lines))
    return EXIT_OK if all(report.holds for report in reports) else EXIT_FAILED


def cmd_fiber(args: argparse.Namespace, settings: Settings) -> int:
    report = fiber_classify(args.lam)
    if settings.output == "text":
        points = ", ".join(f"({x.re:+.6f}{x.im:+.6f}i, {y.re:+.6f}{y.im:+.6f}i)"
                           for x, y in report.singular_points)
        _emit(f"lambda = {args.lam}: {report.kind}"
              + (f", singular at {points}" if points else "")
              + (f", components {report.components}" if report.components else ""))
    else:
        _emit(_dumps(report.model_dump(mode="json")))
    return EXIT_OK


def cmd_instantons(args: argparse.Namespace, settings: Settings) -> int:
    order = max(settings.order if args.order is None else args.order, args.d_max, MIN_MIRROR_ORDER)
    table = instanton_numbers(epsilon_of_sqrtq(order), args.d_max)
    if settings.output == "json":
        _emit(_dumps(table.model_dump(mode="json")))
    elif settings.output == "csv":
        _emit(_csv([{"d": d, "n_d": n} for d, n in table.numbers.items()], ["d", "n_d"]))
    else:
        _emit("\n".join(f"n_{d} = {n}" for d, n in table.numbers.items()))
    return EXIT_OK


def cmd_runs(args: argparse.Namespace, settings: Settings) -> int:
    init_db(settings.db_path)
    if args.id is not None:
        run = get_run(args.id)
        if run is None:
            raise ValueError(f"no recorded run with id {args.id}")
        _emit(_dumps(run.model_dump(mode="json")))
        return EXIT_OK
    if args.failed:
        rows = [{"run_id": record.run_id, "group": record.group, "name": record.name,
                 "detail": record.detail or ""} for record in get_failed_checks(args.limit)]
        if settings.output == "csv":
            _emit(_csv(rows, ["run_id", "group", "name", "detail"]))
        elif settings.output == "text":
            _emit("\n".join(f"run {row['run_id']}  [{row['group']}] {row['name']}  {row['detail']}"
                            for row in rows))
        else:
            _emit(_dumps(rows))
        return EXIT_OK
    runs = list_runs(args.limit)
    if settings.output == "text":
        _emit("\n".join(
            f"{run.id}  {run.started_at:%Y-%m-%d %H:%M:%S}  order {run.order}  {run.status}  "
            f"{run.passed}/{run.failed}/{run.flagged}" for run in runs
        ))
    elif settings.output == "csv":
        rows = [run.model_dump(mode="json", exclude={"checks"}) for run in runs]
        _emit(_csv(rows, ["id", "started_at", "order", "passed", "failed", "flagged", "status"]))
    else:
        _emit(_dumps([run.model_dump(mode="json", exclude={"checks"}) for run in runs]))
    return EXIT_OK


COMMANDS = {
    "dos": cmd_dos,
    "series": cmd_series,
    "ode": cmd_ode,
    "verify": cmd_verify,
    "butterfly": cmd_butterfly,
    "monodromy": cmd_monodromy,
    "fiber": cmd_fiber,
    "instantons": cmd_instantons,
    "runs": cmd_runs,
}


# ----------------------------------------------------------------------
# Entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="key=value settings file")
    common.add_argument("--output", choices=["json", "csv", "text"], default=argparse.SUPPRESS,
                        help="Output format (default: json)")
    common.add_argument("--log-level", default=argparse.SUPPRESS, help="Logging level (default: WARNING)")
    common.add_argument("--db-path", default=argparse.SUPPRESS, help="SQLAlchemy URL of the run ledger")

    parser = argparse.ArgumentParser(
        prog="spectral-pf",
        description="Density of states, Picard-Fuchs equations and mirror maps of the Harper operator",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    dos = sub.add_parser("dos", parents=[common], help="Density of states at one energy level")
    dos.add_argument("--epsilon", type=float, required=True, help="Energy level in (0, 1]")
    dos.add_argument("--a", type=int, default=None, help="First lattice period (default: 2)")
    dos.add_argument("--b", type=int, default=None, help="Second lattice period (default: 3)")

    series = sub.add_parser("series", parents=[common], help="Print a named exact series")
    series.add_argument("--name", choices=SERIES_NAMES, required=True)
    series.add_argument("--order", type=int, default=None, help="Truncation order (default: settings)")

    ode = sub.add_parser("ode", parents=[common], help="Coefficients, Q-form and Theta-form of an equation")
    ode.add_argument("--name", choices=list(NAMED_EQUATIONS), required=True)
    ode.add_argument("--pullback", nargs=4, metavar=("A", "B", "C", "D"), default=None,
                     help="Pull back along x = (A t + B)/(C t + D), exact rationals")
    ode.add_argument("--variable", default=None, help="Name of the new variable")

    verify = sub.add_parser("verify", parents=[common], help="Run the acceptance suite")
    scope = verify.add_mutually_exclusive_group()
    scope.add_argument("--all", action="store_true", help="Run every group (default)")
    scope.add_argument("--group", action="append", choices=GROUPS, help="Run one group (repeatable)")
    verify.add_argument("--order", type=int, default=None, help="Series order (lifted to at least 8)")
    verify.add_argument("--record", action="store_true", help="Store the run in the ledger")

    bfly = sub.add_parser("butterfly", parents=[common], help="Harper spectra at rational fluxes")
    bfly.add_argument("--q-max", type=int, required=True, help="Largest flux denominator (<= 100)")
    bfly.add_argument("--grid", type=int, default=None, help="Zone samples per axis (default: 16)")
    bfly.add_argument("--gap-threshold", type=float, default=None, help="Gap merge threshold")
    bfly.add_argument("--workers", type=int, default=None, help="Concurrent slices")
    bfly.add_argument("--out", default=None, help="CSV file to write")

    sub.add_parser("monodromy", parents=[common], help="Lemma identities and local monodromies")

    fiber = sub.add_parser("fiber", parents=[common], help="Classify the Fermi curve at an energy")
    fiber.add_argument("--lam", type=complex, required=True, help="Energy, e.g. 4 or 2+1j")

    inst = sub.add_parser("instantons", parents=[common], help="Integer instanton numbers")
    inst.add_argument("--d-max", type=int, default=20)
    inst.add_argument("--order", type=int, default=None)

    runs = sub.add_parser("runs", parents=[common], help="List recorded verification runs")
    runs.add_argument("--limit", type=int, default=20)
    runs.add_argument("--id", type=int, default=None, help="Show one run with its checks")
    runs.add_argument("--failed", action="store_true", help="List failed checks across runs")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    overrides = {
        "output": getattr(args, "output", None),
        "log_level": getattr(args, "log_level", None),
        "db_path": getattr(args, "db_path", None),
        "a": getattr(args, "a", None),
        "b": getattr(args, "b", None),
        "grid": getattr(args, "grid", None),
        "gap_threshold": getattr(args, "gap_threshold", None),
        "workers": getattr(args, "workers", None),
    }
    try:
        settings = load_settings(getattr(args, "config", None), **overrides)
    except (ValidationError, ValueError) as e:
        setup_logging("WARNING")
        logger.error(f"Invalid configuration: {e}")
        print(f"Error: invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(settings.log_level)
    logger.debug(f"Running {args.command} with {settings.model_dump()}")
    try:
        return COMMANDS[args.command](args, settings)
    except (ValueError, NotImplementedError, ValidationError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILED


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
