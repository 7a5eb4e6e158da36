"""Fitting copula mixtures: pseudo-observations, EM, BIC selection.

The approximating mixture (Mixture II) is a normal mixture fitted by EM to
latent scores ``z = H^-1(u)``. The mixture of Gaussian copulas (Mixture I) is
fitted directly on the cube with a correlation-normalized M-step so that both
kinds can be compared on the same cube log-likelihood.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy import special, stats
from sklearn.cluster import kmeans_plusplus

from .copulas import GaussianCopula, GaussianCopulaMixture, nearest_correlation
from .core.errors import DimensionError, NumericalError, ValidationError
from .core.unit import as_unit_array
from .mixture import (
    CovarianceMode,
    FitInfo,
    GaussianMixtureModel,
    MixtureKind,
    bic,
    param_count,
)
from .options import FitConfig
from .transforms import MarginalTransform

logger = logging.getLogger(__name__)

MIN_WEIGHT = 1e-8
# Consecutive iterations with a clipped eigenvalue before a restart is degenerate.
FLOOR_STREAK_LIMIT = 3
RECOMMENDED_MIN_ROWS = 10
_EPS = 10.0 * np.finfo(float).eps


def _as_data_matrix(data: Any) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected an n x M data matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("data contains non-finite entries")
    return arr


def _check_columns(arr: np.ndarray) -> None:
    constant = [j for j in range(arr.shape[1]) if np.all(arr[:, j] == arr[0, j])]
    if constant:
        raise ValidationError(f"constant column(s) {constant} carry no rank information")


def pseudo_observations(data: Any) -> np.ndarray:
    """Column-wise ``rank / (n + 1)`` with ties given their average rank."""
    arr = _as_data_matrix(data)
    n = arr.shape[0]
    if n < 2:
        raise ValidationError("pseudo-observations need at least two rows")
    if n < RECOMMENDED_MIN_ROWS:
        logger.warning("only %d rows; pseudo-observations are very coarse", n)
    _check_columns(arr)
    ranks = stats.rankdata(arr, method="average", axis=0)
    return ranks / (n + 1.0)


def parametric_observations(data: Any) -> np.ndarray:
    """``Phi`` of column-standardized data, for residuals assumed normal."""
    arr = _as_data_matrix(data)
    if arr.shape[0] < 2:
        raise ValidationError("parametric observations need at least two rows")
    _check_columns(arr)
    standardized = (arr - arr.mean(axis=0)) / arr.std(axis=0, ddof=1)
    return as_unit_array(special.ndtr(standardized))


def latent_embed(u: Any, t: MarginalTransform) -> np.ndarray:
    z = t.inverse(as_unit_array(u, t.dimension))
    if not np.all(np.isfinite(z)):
        raise NumericalError("latent embedding produced non-finite scores")
    return z


def _restart_seeds(seed: int, n_components: int, restarts: int) -> list[int]:
    state = np.random.SeedSequence([seed, n_components]).generate_state(restarts)
    return [int(s) for s in state]


def _initial_responsibilities(z: np.ndarray, n_components: int, seed: int) -> np.ndarray:
    centers, _ = kmeans_plusplus(z, n_components, random_state=seed)
    dist = ((z[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    resp = np.zeros((z.shape[0], n_components))
    resp[np.arange(z.shape[0]), np.argmin(dist, axis=1)] = 1.0
    return resp


def _clip_covariance(cov: np.ndarray, floor: float) -> tuple[np.ndarray, bool]:
    cov = 0.5 * (cov + cov.T)
    values, vectors = np.linalg.eigh(cov)
    if values.min() >= floor:
        return cov, False
    clipped = (vectors * np.maximum(values, floor)) @ vectors.T
    return 0.5 * (clipped + clipped.T), True


def _m_step(
    z: np.ndarray, resp: np.ndarray, mode: CovarianceMode, floor: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    n, dim = z.shape
    nk = resp.sum(axis=0) + _EPS
    weights = nk / nk.sum()
    means = (resp.T @ z) / nk[:, None]
    covs = np.empty((resp.shape[1], dim, dim))
    floor_hit = False
    for r in range(resp.shape[1]):
        diff = z - means[r]
        if mode is CovarianceMode.SPHERICAL:
            var = float(resp[:, r] @ np.sum(diff * diff, axis=1)) / (dim * nk[r])
            if var < floor:
                var, floor_hit = floor, True
            covs[r] = var * np.eye(dim)
        else:
            cov = (resp[:, r, None] * diff).T @ diff / nk[r]
            covs[r], hit = _clip_covariance(cov, floor)
            floor_hit = floor_hit or hit
    return weights, means, covs, floor_hit


@dataclass
class _RestartResult:
    model: GaussianMixtureModel
    trace: list[float]
    converged: bool
    degenerate: bool
    reason: str = ""

    @property
    def log_likelihood(self) -> float:
        return self.trace[-1]


def _run_restart(
    z: np.ndarray, n_components: int, config: FitConfig, seed: int
) -> _RestartResult:
    mode = config.covariance_mode
    weights, means, covs, _ = _m_step(
        z, _initial_responsibilities(z, n_components, seed), mode, config.reg_floor  # type: ignore[arg-type]
    )
    model = GaussianMixtureModel(weights, means, covs, mode)
    trace: list[float] = []
    floor_streak = 0
    for iteration in range(config.max_iter):
        log_prob = model.component_log_pdf(z)
        log_norm = special.logsumexp(log_prob, axis=1)
        loglik = float(np.sum(log_norm))
        if not math.isfinite(loglik):
            raise NumericalError("EM log-likelihood is not finite")
        if trace and abs(loglik - trace[-1]) <= config.tol * max(abs(trace[-1]), 1.0):
            trace.append(loglik)
            return _RestartResult(model, trace, True, False)
        trace.append(loglik)
        if iteration == config.max_iter - 1:
            break
        resp = np.exp(log_prob - log_norm[:, None])
        weights, means, covs, hit = _m_step(z, resp, mode, config.reg_floor)  # type: ignore[arg-type]
        floor_streak = floor_streak + 1 if hit else 0
        if weights.min() < MIN_WEIGHT:
            return _RestartResult(model, trace, False, True, "vanishing component weight")
        if floor_streak >= FLOOR_STREAK_LIMIT:
            return _RestartResult(model, trace, False, True, "covariance floor hit repeatedly")
        model = GaussianMixtureModel(weights, means, covs, mode)
    return _RestartResult(model, trace, False, False)


def em_fit(z: Any, config: FitConfig, n_components: int) -> GaussianMixtureModel:
    """Best-of-restarts EM fit of an ``n_components`` normal mixture to ``z``.

    The returned model carries a ``FitInfo`` with the log-likelihood trace of
    the winning restart. Degenerate restarts are logged and skipped; if every
    restart degenerates a ``NumericalError`` is raised.
    """
    z = _as_data_matrix(z)
    n, dim = z.shape
    if n_components < 1:
        raise ValidationError("n_components must be at least 1")
    if n <= n_components * dim:
        raise ValidationError(
            f"{n} points cannot support {n_components} components in dimension {dim}"
        )
    best: Optional[_RestartResult] = None
    reasons: list[str] = []
    seeds = _restart_seeds(config.seed, n_components, config.restarts)
    for index, seed in enumerate(seeds):
        result = _run_restart(z, n_components, config, seed)
        if result.degenerate:
            logger.warning(
                "R=%d restart %d degenerate: %s", n_components, index, result.reason
            )
            reasons.append(result.reason)
            continue
        logger.debug(
            "R=%d restart %d: loglik=%.6f after %d iterations (converged=%s)",
            n_components,
            index,
            result.log_likelihood,
            len(result.trace),
            result.converged,
        )
        if best is None or result.log_likelihood > best.log_likelihood:
            best = result
    if best is None:
        raise NumericalError(
            f"all {config.restarts} restarts for R={n_components} were degenerate "
            f"({'; '.join(sorted(set(reasons)))})"
        )
    info = FitInfo(
        log_likelihood=best.log_likelihood,
        iterations=len(best.trace),
        converged=best.converged,
        restarts=config.restarts,
        seed=config.seed,
        trace=tuple(best.trace),
    )
    return best.model.with_info(info)


def _optional_count(kind: MixtureKind, dim: int, n_components: int) -> Optional[int]:
    return param_count(kind, dim, n_components) if dim >= 2 else None


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


@dataclass(frozen=True)
class FitRecord:
    """One row of a model-selection report."""

    n_components: int
    log_likelihood: float
    n_parameters: int
    bic: float
    iterations: int
    converged: bool
    failure: Optional[str] = None
    mixture_i_parameters: Optional[int] = None
    mixture_ii_parameters: Optional[int] = None

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "n_components": self.n_components,
            "log_likelihood": _finite_or_none(self.log_likelihood),
            "n_parameters": self.n_parameters,
            "bic": _finite_or_none(self.bic),
            "iterations": self.iterations,
            "converged": self.converged,
            "failure": self.failure,
            "mixture_i_parameters": self.mixture_i_parameters,
            "mixture_ii_parameters": self.mixture_ii_parameters,
        }


@dataclass(frozen=True)
class FitReport:
    """Per-candidate records in ascending ``R`` and the BIC-selected count."""

    records: tuple[FitRecord, ...]
    selected: int
    n_samples: int
    dimension: int
    config: FitConfig
    models: dict[int, GaussianMixtureModel] = field(
        default_factory=dict, compare=False, repr=False
    )

    @property
    def selected_model(self) -> GaussianMixtureModel:
        return self.models[self.selected]

    def record(self, n_components: int) -> FitRecord:
        for rec in self.records:
            if rec.n_components == n_components:
                return rec
        raise KeyError(n_components)

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "kind": "fit_report",
            "n_samples": self.n_samples,
            "dimension": self.dimension,
            "selected": self.selected,
            "config": self.config.to_export_dict(),
            "records": [rec.to_export_dict() for rec in self.records],
        }


def select_model(z: Any, config: FitConfig) -> FitReport:
    """Fit every candidate ``R`` and pick the converged fit with the lowest BIC."""
    z = _as_data_matrix(z)
    n, dim = z.shape
    records: list[FitRecord] = []
    models: dict[int, GaussianMixtureModel] = {}
    for n_components in config.candidates:
        counts = {
            "mixture_i_parameters": _optional_count(MixtureKind.MIXTURE_I, dim, n_components),
            "mixture_ii_parameters": _optional_count(MixtureKind.MIXTURE_II, dim, n_components),
        }
        try:
            model = em_fit(z, config, n_components)
        except (NumericalError, ValidationError) as exc:
            logger.warning("R=%d fit failed: %s", n_components, exc)
            records.append(
                FitRecord(n_components, math.nan, 0, math.nan, 0, False, str(exc), **counts)
            )
            continue
        assert model.info is not None
        k = model.n_parameters
        criterion = bic(model.info.log_likelihood, k, n)
        models[n_components] = model
        records.append(
            FitRecord(
                n_components,
                model.info.log_likelihood,
                k,
                criterion,
                model.info.iterations,
                model.info.converged,
                None,
                **counts,
            )
        )
        logger.info("R=%d: loglik=%.4f k=%d BIC=%.4f", n_components, model.info.log_likelihood, k, criterion)
    converged = [rec for rec in records if rec.converged]
    if not converged:
        raise NumericalError("all candidate component counts failed to converge")
    selected = min(converged, key=lambda rec: (rec.bic, rec.n_components)).n_components
    logger.info("selected R=%d", selected)
    return FitReport(tuple(records), selected, n, dim, config, models)


@dataclass(frozen=True)
class CopulaMixtureFit:
    """A fitted mixture of Gaussian copulas and its cube log-likelihood."""

    mixture: GaussianCopulaMixture
    log_likelihood: float
    iterations: int
    converged: bool


def _correlation_m_step(
    z: np.ndarray, resp: np.ndarray
) -> tuple[np.ndarray, tuple[GaussianCopula, ...]]:
    nk = resp.sum(axis=0) + _EPS
    weights = nk / nk.sum()
    components = []
    for r in range(resp.shape[1]):
        scatter = (resp[:, r, None] * z).T @ z / nk[r]
        components.append(GaussianCopula(nearest_correlation(scatter)))
    return weights, tuple(components)


def fit_gaussian_copula_mixture(
    u: Any, n_components: int, config: FitConfig
) -> CopulaMixtureFit:
    """EM-style fit of ``sum_r pi_r c(u; R_r)`` on pseudo-observations ``u``.

    The M-step takes each component's weighted normal-score scatter and
    projects it to the nearest correlation matrix, so ascent is approximate.
    """
    u = as_unit_array(u)
    n, dim = u.shape
    if dim < 2:
        raise DimensionError("a Gaussian copula mixture needs dimension >= 2")
    if n <= n_components * dim:
        raise ValidationError(
            f"{n} points cannot support {n_components} components in dimension {dim}"
        )
    z = special.ndtri(u)
    best: Optional[CopulaMixtureFit] = None
    for seed in _restart_seeds(config.seed, n_components, config.restarts):
        weights, components = _correlation_m_step(
            z, _initial_responsibilities(z, n_components, seed)
        )
        previous = -math.inf
        converged = False
        iterations = 0
        current: Optional[CopulaMixtureFit] = None
        for iterations in range(1, config.max_iter + 1):
            mixture = GaussianCopulaMixture(weights, components)
            log_prob = mixture.component_log_densities(u) + np.log(mixture.weights)
            log_norm = special.logsumexp(log_prob, axis=1)
            loglik = float(np.sum(log_norm))
            if current is None or loglik >= current.log_likelihood:
                current = CopulaMixtureFit(mixture, loglik, iterations, False)
            if abs(loglik - previous) <= config.tol * max(abs(previous), 1.0):
                converged = True
                break
            previous = loglik
            weights, components = _correlation_m_step(z, np.exp(log_prob - log_norm[:, None]))
            if weights.min() < MIN_WEIGHT:
                logger.warning("Gaussian copula mixture R=%d: vanishing weight", n_components)
                break
        assert current is not None
        current = CopulaMixtureFit(current.mixture, current.log_likelihood, iterations, converged)
        if best is None or current.log_likelihood > best.log_likelihood:
            best = current
    assert best is not None
    return best


@dataclass(frozen=True)
class KindComparison:
    """Cube log-likelihood, parameter count and BIC of both kinds at one ``R``."""

    n_components: int
    mixture_i_log_likelihood: float
    mixture_i_parameters: int
    mixture_i_bic: float
    mixture_ii_log_likelihood: float
    mixture_ii_parameters: int
    mixture_ii_bic: float

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "n_components": self.n_components,
            "mixture_i_log_likelihood": _finite_or_none(self.mixture_i_log_likelihood),
            "mixture_i_parameters": self.mixture_i_parameters,
            "mixture_i_bic": _finite_or_none(self.mixture_i_bic),
            "mixture_ii_log_likelihood": _finite_or_none(self.mixture_ii_log_likelihood),
            "mixture_ii_parameters": self.mixture_ii_parameters,
            "mixture_ii_bic": _finite_or_none(self.mixture_ii_bic),
        }


def compare_mixture_kinds(u: Any, config: FitConfig) -> list[KindComparison]:
    """BIC of a Gaussian copula mixture against the approximating mixture per candidate ``R``.

    Mixture II's latent log-likelihood is moved to the cube by subtracting the
    Jacobian of the normal-score transform.
    """
    u = as_unit_array(u)
    n, dim = u.shape
    transform = MarginalTransform.standard_normal(dim)
    z = latent_embed(u, transform)
    jacobian = float(np.sum(transform.log_jacobian(z)))
    rows: list[KindComparison] = []
    for n_components in config.candidates:
        k_i = param_count(MixtureKind.MIXTURE_I, dim, n_components)
        k_ii = param_count(MixtureKind.MIXTURE_II, dim, n_components)
        try:
            ll_i = fit_gaussian_copula_mixture(u, n_components, config).log_likelihood
        except (NumericalError, ValidationError) as exc:
            logger.warning("Mixture I R=%d failed: %s", n_components, exc)
            ll_i = math.nan
        try:
            model = em_fit(z, config, n_components)
            assert model.info is not None
            ll_ii = model.info.log_likelihood - jacobian
        except (NumericalError, ValidationError) as exc:
            logger.warning("Mixture II R=%d failed: %s", n_components, exc)
            ll_ii = math.nan
        rows.append(
            KindComparison(
                n_components,
                ll_i,
                k_i,
                bic(ll_i, k_i, n) if math.isfinite(ll_i) else math.nan,
                ll_ii,
                k_ii,
                bic(ll_ii, k_ii, n) if math.isfinite(ll_ii) else math.nan,
            )
        )
    return rows
