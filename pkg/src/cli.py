#!/usr/bin/env python3
"""
noncoll-extremes command line

Evaluates the extreme-value laws at a point or over a grid, compares them
with the Monte Carlo oracle, computes height moments and runs the
self-test battery. Data goes to stdout (or --out); everything else goes to
stderr.
"""

import argparse
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from functools import partial
from pathlib import Path

from pydantic import ValidationError

from src.config import (
    DEBUG,
    DEFAULT_WORKERS,
    LOG_LEVEL,
    PROCESS_AXES,
    Command,
    GridSpec,
    Process,
    RunConfig,
    resolve_tolerance,
)
from src.diffusions.extremes import (
    CdfEvaluation,
    ProcessKind,
    ProcessTag,
    cdf_bessel_H,
    cdf_bridge_joint_LR,
    cdf_general,
    cdf_meander_H,
    cdf_motion_joint_LR,
    evaluate_grid,
)
from src.diffusions.kernels import Chamber, IntervalGeometry, OrderedConfiguration
from src.diffusions.width import cdf_width, height_moment_from_cdf, height_moment_n1
from src.errors import InputError, NoncollidingError
from src.montecarlo.mc_oracle import (
    EmpiricalCdf,
    PathEnsemble,
    Statistic,
    empirical_cdf,
    empirical_joint_lr,
    sample_bridge_ensemble,
)
from src.selftest import run_self_test
from src.utils.display import (
    console,
    create_cdf_table,
    create_metrics_table,
    create_progress,
    print_error,
    print_header,
    print_status,
    print_success,
    print_warning,
    setup_logging,
)
from src.utils.documents import (
    CdfRecord,
    Document,
    EvalDocument,
    McCompareDocument,
    McCompareRow,
    MomentRow,
    MomentsDocument,
    SelfTestCheck,
    SelfTestDocument,
    TableDocument,
    TableRow,
    document_schema,
    render,
)

logger = logging.getLogger(__name__)

MC_GRID_POINTS = 20

ORACLE_TAGS: dict[Process, ProcessTag] = {
    Process.BRIDGE: ProcessTag.BRIDGE_AA,
    Process.MOTION: ProcessTag.MOTION_AR,
    Process.BESSEL: ProcessTag.BESSEL_CC,
    Process.MEANDER: ProcessTag.MEANDER_CR,
    Process.WIDTH: ProcessTag.BRIDGE_AA,
}

GENERAL_TAGS: dict[Process, ProcessTag] = {
    Process.GENERAL_AB_A: ProcessTag.GENERAL_AB_A,
    Process.GENERAL_AR_A: ProcessTag.GENERAL_AR_A,
    Process.GENERAL_AB_C: ProcessTag.GENERAL_AB_C,
    Process.GENERAL_AR_C: ProcessTag.GENERAL_AR_C,
}


# =============================================================================
# Argument parsing
# =============================================================================

class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised as InputError instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise InputError(f"{self.prog}: {message}")


def parse_grid(axis: str, spec: str) -> GridSpec:
    """Parse `--grid <axis> <min:max:count>`."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"grid range must look like min:max:count, got {spec!r}")
    try:
        return GridSpec(axis=axis, start=float(parts[0]), stop=float(parts[1]), count=int(parts[2]))
    except ValueError as exc:
        raise InputError(f"invalid grid {axis} {spec}: {_first_message(exc)}") from exc


def parse_configuration(spec: str) -> list[float]:
    """Parse `x1,x2,...` into particle positions."""
    try:
        return [float(part) for part in spec.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"positions must look like x1,x2,..., got {spec!r}") from exc


def _first_message(exc: ValueError) -> str:
    if isinstance(exc, ValidationError):
        return "; ".join(str(err["msg"]) for err in exc.errors())
    return str(exc)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", dest="output_path", help="Write data here instead of stdout")
    common.add_argument("--quiet", action="store_true", help="No summary on stderr")
    common.add_argument("--schema", action="store_true", help="Print the output JSON schema")
    common.add_argument("--tol", type=float, help="Absolute tolerance (env NONCOLL_TOL)")
    common.add_argument("--workers", type=int, default=DEFAULT_WORKERS)

    process = ArgumentParser(add_help=False)
    process.add_argument("--process", choices=[p.value for p in Process], default=Process.BESSEL.value)
    process.add_argument("--N", type=int, default=1)
    process.add_argument("--T", type=float, default=1.0)
    for name in ("ell", "r", "h", "w"):
        process.add_argument(f"--{name}", type=float)
    process.add_argument("--grid", nargs=2, metavar=("AXIS", "MIN:MAX:COUNT"))
    for name in ("start", "end"):
        process.add_argument(
            f"--{name}",
            type=parse_configuration,
            metavar="X1,X2,...",
            help=f"{name.capitalize()} positions of a general process (--{name}=-x,... if negative)",
        )

    parser = ArgumentParser(
        prog="noncoll-extremes",
        description="Extreme-value laws of noncolliding Brownian systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common, process], help="Evaluate a law at one point")
    sub.add_parser("table", parents=[common, process], help="Tabulate a law over a grid")
    mc = sub.add_parser("mc-compare", parents=[common, process], help="Compare with Monte Carlo")
    mc.add_argument("--samples", type=int, default=100_000)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--steps", type=int, default=256)
    moments = sub.add_parser("moments", parents=[common, process], help="Height moments")
    moments.add_argument("--m", dest="moment_orders", type=float, nargs="+", default=[2.0, 4.0])
    sub.add_parser("self-test", parents=[common], help="Run the invariant battery")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Validate parsed arguments into a RunConfig, reporting problems as InputError."""
    values = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key not in ("quiet", "schema", "grid")
    }
    values["tol"] = resolve_tolerance(args.tol)
    if getattr(args, "grid", None):
        values["grid"] = parse_grid(*args.grid)
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise InputError(_first_message(exc)) from exc


# =============================================================================
# Law evaluation
# =============================================================================

def general_kind(config: RunConfig) -> ProcessKind:
    """ProcessKind of a general process from --start and --end."""
    tag = GENERAL_TAGS[config.process]
    if config.start is None:
        raise InputError(f"--process {config.process.value} needs --start")
    start = OrderedConfiguration.of(tag.chamber, config.start)
    end = None if config.end is None else OrderedConfiguration.of(tag.chamber, config.end)
    return ProcessKind(tag, start, end)


def evaluate_law(config: RunConfig, axis: str | None = None, value: float | None = None) -> CdfEvaluation:
    """Evaluate the configured law, with `axis` (if any) set to `value`."""

    def geometry(name: str) -> float:
        if name == axis and value is not None:
            return value
        return config.geometry_value(name)

    N, T, tol = config.N, config.T, config.tol
    process = config.process
    if process.is_general:
        kind = general_kind(config)
        if kind.tag.chamber is Chamber.TYPE_C:
            interval = IntervalGeometry(0.0, geometry("h"), T)
        else:
            interval = IntervalGeometry(-geometry("ell"), geometry("r"), T)
        return cdf_general(kind, interval, N, T, tol)
    if process is Process.BRIDGE:
        return cdf_bridge_joint_LR(N, T, geometry("ell"), geometry("r"), tol)
    if process is Process.MOTION:
        return cdf_motion_joint_LR(N, T, geometry("ell"), geometry("r"), tol)
    if process is Process.BESSEL:
        return cdf_bessel_H(N, T, geometry("h"), tol)
    if process is Process.MEANDER:
        return cdf_meander_H(N, T, geometry("h"), tol)
    return cdf_width(N, T, geometry("w"), tol)


def _fixed_geometry(config: RunConfig, axis: str | None) -> dict[str, float]:
    return {
        name: config.geometry_value(name)
        for name in config.required_geometry()
        if name != axis
    }


def _sweep(config: RunConfig, grid: GridSpec) -> list[CdfEvaluation]:
    law: Callable[[float], CdfEvaluation] = partial(evaluate_law, config, grid.axis)
    return evaluate_grid(law, grid.points(), config.workers)


def default_mc_grid(config: RunConfig) -> GridSpec:
    """20 points spanning the bulk of the law being compared."""
    axis = PROCESS_AXES[config.process][0]
    scale = math.sqrt(config.T)
    reach = {
        Process.BRIDGE: 1.0 + 0.5 * config.N,
        Process.MOTION: 1.5 + config.N,
        Process.BESSEL: 1.5 + 0.5 * config.N,
        Process.MEANDER: 2.0 + config.N,
        Process.WIDTH: 2.0 + config.N,
    }[config.process]
    return GridSpec(axis=axis, start=0.25 * scale, stop=reach * scale, count=MC_GRID_POINTS)


# =============================================================================
# Commands
# =============================================================================

def run_eval(config: RunConfig) -> EvalDocument:
    evaluation = evaluate_law(config)
    return EvalDocument(
        process=config.process.value,
        tol=config.tol,
        evaluation=CdfRecord.from_evaluation(evaluation),
    )


def run_table(config: RunConfig) -> TableDocument:
    assert config.grid is not None
    grid = config.grid
    evaluations = _sweep(config, grid)
    rows = [
        TableRow(arg=arg, value=ev.value, error_estimate=ev.error_estimate)
        for arg, ev in zip(grid.points(), evaluations, strict=True)
    ]
    return TableDocument(
        process=config.process.value,
        N=config.N,
        T=config.T,
        axis=grid.axis,
        fixed=_fixed_geometry(config, grid.axis),
        tol=config.tol,
        rows=rows,
    )


def _empirical(config: RunConfig, grid: GridSpec, ensemble: PathEnsemble) -> EmpiricalCdf:
    points = grid.points()
    if config.process in (Process.BRIDGE, Process.MOTION):
        if grid.axis == "r":
            return empirical_joint_lr(ensemble, [config.geometry_value("ell")], points)
        return empirical_joint_lr(ensemble, points, [config.geometry_value("r")])
    statistic = Statistic.W if config.process is Process.WIDTH else Statistic.H
    return empirical_cdf(ensemble, statistic, points)


def run_mc_compare(config: RunConfig, quiet: bool = True) -> McCompareDocument:
    grid = config.grid or default_mc_grid(config)
    tag = ORACLE_TAGS[config.process]

    if quiet:
        ensemble = sample_bridge_ensemble(
            tag, config.N, config.T, config.steps, config.samples, config.seed,
            workers=config.workers,
        )
    else:
        with create_progress() as progress:
            task = progress.add_task(f"Sampling {config.samples} {tag.value} paths", total=None)
            ensemble = sample_bridge_ensemble(
                tag, config.N, config.T, config.steps, config.samples, config.seed,
                workers=config.workers,
            )
            progress.update(task, completed=1, total=1)

    empirical = _empirical(config, grid, ensemble)
    analytic = _sweep(config, grid)
    # half a sample of slack so that exact 0/1 estimates are not rejected outright
    slack = 0.5 / empirical.n_samples
    rows = []
    for i, arg in enumerate(grid.points()):
        estimate = float(empirical.estimates[i])
        half = float(empirical.half_widths[i])
        rows.append(
            McCompareRow(
                arg=arg,
                analytic=analytic[i].value,
                empirical=estimate,
                ci_half_width=half,
                inside_ci=abs(analytic[i].value - estimate) <= half + slack,
            )
        )
    coverage = sum(r.inside_ci for r in rows) / len(rows)
    return McCompareDocument(
        process=config.process.value,
        N=config.N,
        T=config.T,
        axis=grid.axis,
        fixed=_fixed_geometry(config, grid.axis),
        seed=config.seed,
        steps=config.steps,
        samples=ensemble.accepted,
        attempted=ensemble.attempted,
        acceptance_rate=ensemble.acceptance_rate,
        coverage=coverage,
        rows=rows,
    )


def run_moments(config: RunConfig) -> MomentsDocument:
    if config.process not in (Process.BESSEL, Process.MEANDER):
        raise InputError("moments are defined for --process bessel or meander")
    rows = []
    for m in config.moment_orders:
        from_cdf = height_moment_from_cdf(m, config.N, config.T, config.process, config.tol)
        analytic = None
        relative = None
        if config.process is Process.BESSEL and config.N == 1:
            analytic = height_moment_n1(m, config.T)
            relative = abs(from_cdf - analytic) / abs(analytic)
        rows.append(MomentRow(m=m, analytic=analytic, from_cdf=from_cdf, relative_difference=relative))
    return MomentsDocument(process=config.process.value, N=config.N, T=config.T, rows=rows)


# =============================================================================
# Summaries (stderr)
# =============================================================================

def _summarize(document: Document) -> None:
    if isinstance(document, EvalDocument):
        ev = document.evaluation
        console.print(create_metrics_table(
            {"value": ev.value, "raw": ev.raw, "error estimate": ev.error_estimate, "N": ev.N, "T": ev.T},
            title=f"{document.process}",
        ))
    elif isinstance(document, TableDocument):
        console.print(create_cdf_table(
            [document.axis, "value", "error estimate"],
            [[r.arg, r.value, r.error_estimate] for r in document.rows],
            title=f"{document.process} N={document.N} T={document.T:g}",
        ))
    elif isinstance(document, McCompareDocument):
        console.print(create_cdf_table(
            [document.axis, "analytic", "empirical", "± 99%", "inside"],
            [[r.arg, r.analytic, r.empirical, r.ci_half_width, r.inside_ci] for r in document.rows],
            title=f"{document.process} N={document.N}: {document.samples} samples",
        ))
        line = f"coverage {document.coverage:.2%}, acceptance {document.acceptance_rate:.3g}"
        if document.coverage >= 0.95:
            print_success(line)
        else:
            print_warning(line)
    elif isinstance(document, MomentsDocument):
        console.print(create_cdf_table(
            ["m", "analytic", "from CDF", "relative difference"],
            [[r.m, r.analytic, r.from_cdf, r.relative_difference] for r in document.rows],
            title=f"height moments, {document.process} N={document.N}",
        ))


def _report_check(check: SelfTestCheck) -> None:
    if check.passed:
        print_success(f"{check.name} [dim]({check.detail})[/dim]")
    else:
        print_error(f"{check.name}: {check.detail}")


def _emit(text: str, output_path: str | None) -> None:
    if output_path:
        Path(output_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def run(config: RunConfig, quiet: bool = False) -> int:
    """
    Execute one command and emit its document.

    Returns the exit status: 0 on success, 1 for invalid input, 2 for a
    numerical failure or a failed self-test.
    """
    try:
        if not quiet:
            print_status(f"{config.command.value}: {config.process.value}, N={config.N}, T={config.T:g}")
        document: Document
        if config.command is Command.EVAL:
            document = run_eval(config)
        elif config.command is Command.TABLE:
            document = run_table(config)
        elif config.command is Command.MC_COMPARE:
            document = run_mc_compare(config, quiet)
        elif config.command is Command.MOMENTS:
            document = run_moments(config)
        else:
            document = run_self_test(config.tol, None if quiet else _report_check)

        _emit(render(document, config.output_format), config.output_path)
        if not quiet:
            _summarize(document)
            if config.output_path:
                print_success(f"Saved to {config.output_path}")
    except NoncollidingError as exc:
        print_error(str(exc))
        if DEBUG:
            console.print_exception()
        return exc.exit_status
    except OSError as exc:
        print_error(f"cannot write output: {exc}")
        return 1

    if isinstance(document, SelfTestDocument) and document.failed:
        print_error(f"{document.failed} of {document.passed + document.failed} checks failed")
        return 2
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point for the CLI."""
    setup_logging("DEBUG" if DEBUG else LOG_LEVEL)
    try:
        args = build_parser().parse_args(argv)
        if args.schema:
            sys.stdout.write(json.dumps(document_schema(args.command), indent=2) + "\n")
            return 0
        config = config_from_args(args)
    except InputError as exc:
        print_error(str(exc))
        return exc.exit_status

    if not args.quiet:
        print_header("noncoll-extremes", "extremes of noncolliding Brownian systems")
    return run(config, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())
