"""Batch stages behind the command line: sample, fit, density, diagnose, experiment.

Each stage runs inside ``stage(name)``, which tags any library failure with the
stage it came from so the CLI can report where a run broke.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Optional, Sequence, Union

import numpy as np

from .core.contracts import CopulaCdf
from .core.errors import CopmixError, StageError
from .core.unit import interior_grid
from .diagnostics import (
    EXCHANGE_WITNESS,
    RADIAL_WITNESS,
    DistanceEstimate,
    GapReport,
    KSResult,
    default_exchange_pairs,
    default_radial_points,
    exchangeability_gap,
    l1_distance,
    linf_distance,
    marginal_uniformity,
    radial_symmetry_gap,
)
from .fitting import (
    FitReport,
    KindComparison,
    compare_mixture_kinds,
    em_fit,
    latent_embed,
    parametric_observations,
    pseudo_observations,
    select_model,
)
from .io.output import write_csv, write_json
from .mixture import MixtureKind, QRDensity, bic, param_count
from .options import DiagnosticsConfig, ExperimentSpec, FitConfig
from .transforms import MarginalTransform

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@contextmanager
def stage(name: str) -> Iterator[None]:
    logger.info("stage %s: start", name)
    try:
        yield
    except StageError:
        raise
    except (CopmixError, ValueError, ArithmeticError, OSError) as exc:
        logger.debug("stage %s failed", name, exc_info=True)
        raise StageError(name, exc) from exc
    logger.info("stage %s: done", name)


@dataclass(frozen=True)
class SampleResult:
    """Copula draws ``U`` and the data ``X = F^-1(U)`` built from them."""

    copula_draws: np.ndarray
    data: np.ndarray


def run_sample(spec: ExperimentSpec, seed: Optional[int] = None) -> SampleResult:
    with stage("sample"):
        copula = spec.copula.build()
        draws = copula.sample(spec.n, spec.seed if seed is None else seed)
        columns = [m.build().ppf(draws[:, i]) for i, m in enumerate(spec.marginals)]
        return SampleResult(draws, np.column_stack(columns))


@dataclass(frozen=True)
class FitResult:
    report: FitReport
    density: QRDensity
    observations: np.ndarray
    latent: np.ndarray


def observations_for(data: Any, config: FitConfig) -> np.ndarray:
    if config.marginals == "parametric":
        return parametric_observations(data)
    return pseudo_observations(data)


def run_fit(data: Any, config: FitConfig) -> FitResult:
    with stage("fit"):
        u = observations_for(data, config)
        transform = MarginalTransform.named(config.transform, u.shape[1])
        z = latent_embed(u, transform)
        report = select_model(z, config)
        return FitResult(report, QRDensity(report.selected_model, transform), u, z)


def density_rows(
    q: QRDensity,
    grid_per_dim: Optional[int] = None,
    points: Optional[np.ndarray] = None,
) -> tuple[list[str], np.ndarray]:
    """Header and ``(u_1, ..., u_M, q_R(u))`` rows on a grid or at given points."""
    with stage("density"):
        if points is None:
            if grid_per_dim is None:
                raise CopmixError("density needs either a grid size or points")
            points = interior_grid(grid_per_dim, q.dimension)
        values = q.density(points)
        header = [f"u{i + 1}" for i in range(q.dimension)] + ["density"]
        return header, np.column_stack([np.asarray(points, dtype=float), values])


@dataclass(frozen=True)
class DiagnosticsReport:
    dimension: int
    exchangeability: GapReport
    radial_symmetry: GapReport
    cdf_exchangeability: Optional[GapReport]
    marginal_ks: tuple[KSResult, ...]
    l1: Optional[DistanceEstimate]
    linf: Optional[DistanceEstimate]

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "kind": "diagnostics",
            "dimension": self.dimension,
            "exchangeability": self.exchangeability.to_export_dict(),
            "radial_symmetry": self.radial_symmetry.to_export_dict(),
            "cdf_exchangeability": (
                self.cdf_exchangeability.to_export_dict() if self.cdf_exchangeability else None
            ),
            "marginal_ks": [r.to_export_dict() for r in self.marginal_ks],
            "l1": self.l1.to_export_dict() if self.l1 else None,
            "linf": self.linf.to_export_dict() if self.linf else None,
        }


def run_diagnose(target: Any, config: DiagnosticsConfig) -> DiagnosticsReport:
    """Gap reports, marginal KS checks and distances to ``config.reference``."""
    with stage("diagnose"):
        dim = int(target.dimension)
        pairs = default_exchange_pairs(dim, config.grid_per_dim, config.witnesses, config.seed)
        exchange = exchangeability_gap(target, pairs)
        radial = radial_symmetry_gap(
            target, default_radial_points(dim, config.grid_per_dim, config.witnesses, config.seed)
        )
        cdf_gap = None
        if isinstance(target, CopulaCdf):
            cdf_gap = exchangeability_gap(target.cdf, pairs)
        sampler = getattr(target, "sample", None)
        ks: tuple[KSResult, ...] = ()
        if callable(sampler):
            ks = tuple(marginal_uniformity(target, config.ks_samples, config.seed))
        l1 = linf = None
        if config.reference is not None:
            reference = config.reference.build()
            l1 = l1_distance(target, reference, config.l1_samples, config.seed)
            if dim <= 3:
                witnesses = [
                    gap_point.coords
                    for gap in (exchange, radial)
                    for gap_point in (gap.witness, gap.counterpart)
                ]
                if dim == 2:
                    witnesses += [EXCHANGE_WITNESS, RADIAL_WITNESS]
                witnesses += list(config.witnesses)
                linf = linf_distance(
                    target, reference, config.grid_per_dim, np.asarray(witnesses)
                )
        logger.info(
            "exchangeability eta=%.6g radial eta=%.6g", exchange.eta, radial.eta
        )
        return DiagnosticsReport(dim, exchange, radial, cdf_gap, ks, l1, linf)


def run_compare(data: Any, config: FitConfig) -> list[KindComparison]:
    with stage("compare"):
        return compare_mixture_kinds(observations_for(data, config), config)


SUMMARY_HEADER = [
    "n_components",
    "candidate",
    "selected",
    "log_likelihood",
    "n_parameters",
    "bic",
    "converged",
    "l1_to_truth",
    "l1_standard_error",
    "mixture_i_parameters",
    "mixture_ii_parameters",
]


@dataclass(frozen=True)
class ExperimentResult:
    sample: SampleResult
    fit: FitResult
    diagnostics: DiagnosticsReport
    summary: list[list[Any]]
    files: tuple[Path, ...]


def _summary_rows(spec: ExperimentSpec, fit: FitResult) -> list[list[Any]]:
    """One row per fitted ``R``, with an ``R = 1`` baseline added when it was not a candidate."""
    truth = spec.copula.build()
    report = fit.report
    models = dict(report.models)
    if 1 not in models:
        models[1] = em_fit(fit.latent, spec.fit, 1)
    dim = spec.dimension
    rows: list[list[Any]] = []
    for n_components in sorted(set(models) | {rec.n_components for rec in report.records}):
        counts = [
            param_count(kind, dim, n_components) if dim >= 2 else None for kind in MixtureKind
        ]
        model = models.get(n_components)
        if model is None or model.info is None:
            rec = report.record(n_components)
            rows.append(
                [
                    n_components,
                    True,
                    False,
                    rec.log_likelihood,
                    rec.n_parameters,
                    rec.bic,
                    False,
                    None,
                    None,
                    *counts,
                ]
            )
            continue
        q = QRDensity(model, fit.density.transform)
        distance = l1_distance(q, truth, spec.l1_samples, spec.seed)
        loglik = model.info.log_likelihood
        rows.append(
            [
                n_components,
                n_components in report.models,
                n_components == report.selected,
                loglik,
                model.n_parameters,
                bic(loglik, model.n_parameters, report.n_samples),
                model.info.converged,
                distance.estimate,
                distance.standard_error,
                *counts,
            ]
        )
    return rows


def run_experiment(spec: ExperimentSpec, out_dir: PathLike) -> ExperimentResult:
    """Sample, fit, evaluate and diagnose one simulated data set; write every artifact."""
    out = Path(out_dir)
    with stage("experiment"):
        out.mkdir(parents=True, exist_ok=True)
    sample = run_sample(spec)
    fit = run_fit(sample.data, spec.fit)
    header, rows = density_rows(fit.density, spec.grid_per_dim)
    diagnostics = run_diagnose(
        fit.density,
        DiagnosticsConfig(
            grid_per_dim=spec.grid_per_dim,
            l1_samples=spec.l1_samples,
            seed=spec.seed,
            reference=spec.copula,
        ),
    )
    with stage("experiment"):
        summary = _summary_rows(spec, fit)
        dim = spec.dimension
        files = (
            out / "data.csv",
            out / "fit_report.json",
            out / "model.json",
            out / "density.csv",
            out / "diagnostics.json",
            out / "summary.csv",
            out / "spec.json",
        )
        write_csv(files[0], [f"x{i + 1}" for i in range(dim)], sample.data)
        write_json(files[1], fit.report.to_export_dict())
        write_json(files[2], fit.density.to_export_dict())
        write_csv(files[3], header, rows)
        write_json(files[4], diagnostics.to_export_dict())
        write_csv(files[5], SUMMARY_HEADER, summary)
        write_json(files[6], spec.to_export_dict())
    return ExperimentResult(sample, fit, diagnostics, summary, files)


def write_fit(result: FitResult, model_path: PathLike, report_path: PathLike) -> None:
    with stage("fit"):
        write_json(model_path, result.density.to_export_dict())
        write_json(report_path, result.report.to_export_dict())


def write_comparison(rows: Sequence[KindComparison], path: PathLike) -> None:
    with stage("compare"):
        if not rows:
            raise CopmixError("nothing to write")
        header = list(rows[0].to_export_dict())
        write_csv(path, header, [list(r.to_export_dict().values()) for r in rows])
