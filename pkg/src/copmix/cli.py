"""Command line interface for copmix."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, NoReturn, Optional

from . import __version__ as version
from .core.errors import NumericalError, StageError, UsageError, error_kind, error_stage
from .experiment import (
    density_rows,
    run_compare,
    run_diagnose,
    run_experiment,
    run_fit,
    run_sample,
    write_comparison,
    write_fit,
)
from .io.input import (
    load_copula_spec,
    load_diagnostics_config,
    load_experiment_spec,
    load_fit_config,
    load_model,
    read_matrix,
)
from .io.output import dumps_json, write_csv, write_csv_stream, write_json
from .mixture import CovarianceMode
from .options import DiagnosticsConfig, ExperimentSpec, FitConfig
from .transforms import TRANSFORM_NAMES

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

# Flag -> FitConfig field it overrides when given explicitly.
FIT_FLAG_FIELDS = {
    "candidates": "candidates",
    "cov_mode": "covariance_mode",
    "transform": "transform",
    "marginals": "marginals",
    "seed": "seed",
}


def _candidates(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid candidate list '{text}'") from exc
    if not values:
        raise argparse.ArgumentTypeError("candidate list is empty")
    return values


def _add_fit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--candidates",
        type=_candidates,
        default=None,
        help="Component counts to try, e.g. 2,3,4,5 (default: 2,3,4,5)",
    )
    parser.add_argument(
        "--cov-mode",
        choices=[m.value for m in CovarianceMode],
        default=None,
        help="Component covariance shape (default: full)",
    )
    parser.add_argument(
        "--transform",
        choices=list(TRANSFORM_NAMES),
        default=None,
        help="Latent marginal transform H (default: normal)",
    )
    parser.add_argument(
        "--marginals",
        choices=["empirical", "parametric"],
        default=None,
        help="Pseudo-observations from ranks or from a fitted normal CDF (default: empirical)",
    )


class CopmixArgumentParser(argparse.ArgumentParser):
    """Raises ``UsageError`` instead of exiting so usage mistakes get the JSON error line."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = CopmixArgumentParser(
        prog="copmix",
        description="copmix: copula density approximation with Gaussian mixtures",
    )
    parser.add_argument("--version", "-v", action="version", version=version)
    parser.add_argument(
        "--verbose", "-V", action="store_true", help="Log progress to stderr"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sample = commands.add_parser("sample", help="Draw data from an experiment spec")
    sample.add_argument("spec", type=Path, help="Experiment spec file")
    sample.add_argument("--out", "-o", type=Path, required=True, help="Output CSV")
    sample.add_argument("--seed", type=int, default=None, help="Override the spec seed")
    sample.add_argument(
        "--copula-scale",
        action="store_true",
        help="Write the copula draws U instead of the data X",
    )

    fit = commands.add_parser("fit", help="Fit q_R models to a data CSV")
    fit.add_argument("data", type=Path, help="Data CSV, one observation per row")
    fit.add_argument("--config", type=Path, default=None, help="Fit config file")
    fit.add_argument("--out", "-o", type=Path, required=True, help="Model JSON output")
    fit.add_argument(
        "--report",
        type=Path,
        default=None,
        help="Fit report JSON (default: <out stem>.report.json next to the model)",
    )
    fit.add_argument("--seed", type=int, default=None, help="Random seed")
    _add_fit_flags(fit)

    density = commands.add_parser("density", help="Evaluate a fitted model")
    density.add_argument("model", type=Path, help="Model JSON")
    where = density.add_mutually_exclusive_group(required=True)
    where.add_argument("--grid", type=int, help="Points per dimension of the midpoint grid")
    where.add_argument("--points", type=Path, help="CSV of points in (0,1)^M")
    density.add_argument("--out", "-o", type=Path, default=None, help="Output CSV (default: stdout)")

    diagnose = commands.add_parser("diagnose", help="Symmetry gaps, KS checks and distances")
    diagnose.add_argument(
        "target", type=Path, help="Model JSON or copula spec file naming a family"
    )
    diagnose.add_argument("--config", type=Path, default=None, help="Diagnostics config file")
    diagnose.add_argument("--grid", type=int, default=None, help="Grid points per dimension")
    diagnose.add_argument("--seed", type=int, default=None, help="Random seed")
    diagnose.add_argument("--out", "-o", type=Path, default=None, help="Report JSON (default: stdout)")

    experiment = commands.add_parser("experiment", help="Run sample, fit, density and diagnose")
    experiment.add_argument("spec", type=Path, help="Experiment spec file")
    experiment.add_argument("--out", "-o", type=Path, required=True, help="Output directory")
    experiment.add_argument("--seed", type=int, default=None, help="Override the spec seed")
    experiment.add_argument("--grid", type=int, default=None, help="Density grid per dimension")
    _add_fit_flags(experiment)

    compare = commands.add_parser(
        "compare", help="BIC of Gaussian copula mixtures against approximating mixtures"
    )
    compare.add_argument("data", type=Path, help="Data CSV, one observation per row")
    compare.add_argument("--config", type=Path, default=None, help="Fit config file")
    compare.add_argument("--out", "-o", type=Path, required=True, help="Output CSV")
    compare.add_argument("--seed", type=int, default=None, help="Random seed")
    _add_fit_flags(compare)
    return parser


def _explicit_fit_overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        field: getattr(args, flag)
        for flag, field in FIT_FLAG_FIELDS.items()
        if getattr(args, flag, None) is not None
    }


def create_fit_config(args: argparse.Namespace) -> FitConfig:
    """Config file values, then explicitly given flags on top."""
    base = load_fit_config(args.config) if args.config else FitConfig()
    return replace(base, **_explicit_fit_overrides(args))


def create_experiment_spec(args: argparse.Namespace) -> ExperimentSpec:
    spec = load_experiment_spec(args.spec)
    changes: dict[str, Any] = {}
    fit_overrides = _explicit_fit_overrides(args)
    if fit_overrides:
        changes["fit"] = replace(spec.fit, **fit_overrides)
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "grid", None) is not None:
        changes["grid_per_dim"] = args.grid
    return replace(spec, **changes) if changes else spec


def create_diagnostics_config(args: argparse.Namespace) -> DiagnosticsConfig:
    base = load_diagnostics_config(args.config) if args.config else DiagnosticsConfig()
    changes: dict[str, Any] = {}
    if args.grid is not None:
        changes["grid_per_dim"] = args.grid
    if args.seed is not None:
        changes["seed"] = args.seed
    return replace(base, **changes) if changes else base


def _load_target(path: Path) -> Any:
    if path.suffix.lower() == ".json":
        return load_model(path)
    return load_copula_spec(path).build()


def _emit_json(document: Any, out: Optional[Path]) -> None:
    if out is not None:
        write_json(out, document)
    else:
        sys.stdout.write(dumps_json(document) + "\n")


def cmd_sample(args: argparse.Namespace) -> int:
    spec = load_experiment_spec(args.spec)
    result = run_sample(spec, args.seed)
    values = result.copula_draws if args.copula_scale else result.data
    prefix = "u" if args.copula_scale else "x"
    write_csv(args.out, [f"{prefix}{i + 1}" for i in range(values.shape[1])], values)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    config = create_fit_config(args)
    data, _ = read_matrix(args.data)
    result = run_fit(data, config)
    report_path = args.report or args.out.with_name(f"{args.out.stem}.report.json")
    write_fit(result, args.out, report_path)
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    points = read_matrix(args.points)[0] if args.points is not None else None
    header, rows = density_rows(model, args.grid, points)
    if args.out is not None:
        write_csv(args.out, header, rows)
    else:
        write_csv_stream(sys.stdout, header, rows)
    return EXIT_OK


def cmd_diagnose(args: argparse.Namespace) -> int:
    config = create_diagnostics_config(args)
    report = run_diagnose(_load_target(args.target), config)
    _emit_json(report.to_export_dict(), args.out)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    run_experiment(create_experiment_spec(args), args.out)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = create_fit_config(args)
    data, _ = read_matrix(args.data)
    write_comparison(run_compare(data, config), args.out)
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "fit": cmd_fit,
    "density": cmd_density,
    "diagnose": cmd_diagnose,
    "experiment": cmd_experiment,
    "compare": cmd_compare,
}


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _report_error(exc: BaseException) -> int:
    document = {"error": error_kind(exc), "message": str(exc), "stage": error_stage(exc)}
    sys.stderr.write(json.dumps(document, sort_keys=True) + "\n")
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, (NumericalError, ArithmeticError)):
        return EXIT_NUMERICAL
    return EXIT_INVALID


def main(argv: Optional[list[str]] = None) -> int:
    """CLI entry point for copmix."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _report_error(exc)
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (StageError, ValueError, ArithmeticError, OSError) as exc:
        return _report_error(exc)


if __name__ == "__main__":
    sys.exit(main())
