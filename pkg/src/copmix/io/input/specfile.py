"""Flat ``key = value`` spec and config files.

    # comment
    schema_version = 1
    family = example
    theta = 20
    candidates = 2, 3, 4, 5

``schema_version`` is mandatory, keys may appear once, and a key the target
object does not know is an error. Witness points in diagnostics configs are
separated by ``;`` with coordinates separated by spaces or commas. In
experiment specs ``marginal2_means`` (likewise ``_sds``, ``_weights``) sets one
margin and falls back to the shared ``marginal_*`` keys for the rest.
"""

from __future__ import annotations

import re
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Union

from ...core.errors import ValidationError
from ...options import (
    CopulaSpec,
    DiagnosticsConfig,
    ExperimentSpec,
    FitConfig,
    MarginalMixtureSpec,
)

SCHEMA_VERSION = 1

COPULA_KEYS = {"family", "dimension", "theta", "alpha", "beta", "correlation", "finite_difference"}
FIT_KEYS = {
    "candidates",
    "max_iter",
    "tol",
    "covariance_mode",
    "reg_floor",
    "restarts",
    "seed",
    "transform",
    "marginals",
}
MARGINAL_KEYS = {"marginal_means", "marginal_sds", "marginal_weights"}
# marginal<i>_means etc. override the shared marginal_* values for margin i (1-based).
PER_MARGIN_KEY = re.compile(r"^marginal(\d+)_(means|sds|weights)$")
EXPERIMENT_KEYS = (
    COPULA_KEYS
    | (FIT_KEYS - {"seed"})
    | MARGINAL_KEYS
    | {"n", "seed", "grid_per_dim", "l1_samples"}
)
DIAGNOSTICS_KEYS = {"grid_per_dim", "l1_samples", "ks_samples", "seed", "witnesses"} | {
    f"reference_{key}" for key in COPULA_KEYS
}


def parse_key_values(text: str, source: str = "<spec>") -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{line_no}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if not key:
            raise ValidationError(f"{source}:{line_no}: empty key")
        if key in values:
            raise ValidationError(f"{source}:{line_no}: duplicate key '{key}'")
        values[key] = value
    version = values.pop("schema_version", None)
    if version is None:
        raise ValidationError(f"{source}: missing schema_version")
    if version != str(SCHEMA_VERSION):
        raise ValidationError(
            f"{source}: unsupported schema_version {version}; expected {SCHEMA_VERSION}"
        )
    return values


def read_spec_file(path: Union[str, Path]) -> dict[str, str]:
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {source}: {exc}") from exc
    return parse_key_values(text, str(source))


def _check_keys(values: Mapping[str, str], allowed: set[str], what: str) -> None:
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ValidationError(f"unknown {what} key(s): {', '.join(unknown)}")


def _convert(key: str, value: str, kind: Callable[[str], Any]) -> Any:
    try:
        return kind(value)
    except ValueError as exc:
        raise ValidationError(f"invalid value for {key}: {value!r}") from exc


def _floats(value: str) -> tuple[float, ...]:
    return tuple(float(item) for item in value.replace(",", " ").split())


def _ints(value: str) -> tuple[int, ...]:
    return tuple(int(item) for item in value.replace(",", " ").split())


def _bool(value: str) -> bool:
    text = value.strip().lower()
    if text in {"1", "true", "yes", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise ValueError(value)


def _points(value: str) -> tuple[tuple[float, ...], ...]:
    return tuple(_floats(chunk) for chunk in value.split(";") if chunk.strip())


_CONVERTERS: dict[str, Callable[[str], Any]] = {
    "dimension": int,
    "theta": float,
    "alpha": float,
    "beta": float,
    "correlation": _floats,
    "finite_difference": _bool,
    "candidates": _ints,
    "max_iter": int,
    "tol": float,
    "reg_floor": float,
    "restarts": int,
    "seed": int,
    "n": int,
    "grid_per_dim": int,
    "l1_samples": int,
    "ks_samples": int,
    "marginal_means": _floats,
    "marginal_sds": _floats,
    "marginal_weights": _floats,
    "witnesses": _points,
}


def _typed(values: Mapping[str, str], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in values.items():
        if not key.startswith(prefix):
            continue
        name = key[len(prefix):]
        out[name] = _convert(key, value, _CONVERTERS.get(name, str))
    return out


def _pick(typed: Mapping[str, Any], keys: set[str]) -> dict[str, Any]:
    return {k: v for k, v in typed.items() if k in keys}


def copula_spec_from_mapping(values: Mapping[str, str]) -> CopulaSpec:
    _check_keys(values, COPULA_KEYS, "copula spec")
    return CopulaSpec(**_typed(values))


def fit_config_from_mapping(
    values: Mapping[str, str], base: Optional[FitConfig] = None
) -> FitConfig:
    _check_keys(values, FIT_KEYS, "fit config")
    return replace(base or FitConfig(), **_typed(values))


def _split_per_margin(
    values: Mapping[str, str],
) -> tuple[dict[str, str], dict[int, dict[str, Any]]]:
    shared: dict[str, str] = {}
    per_margin: dict[int, dict[str, Any]] = {}
    for key, value in values.items():
        match = PER_MARGIN_KEY.match(key)
        if match is None:
            shared[key] = value
            continue
        per_margin.setdefault(int(match.group(1)), {})[match.group(2)] = _convert(
            key, value, _floats
        )
    return shared, per_margin


def _marginal_specs(
    shared: Mapping[str, Any], per_margin: Mapping[int, Mapping[str, Any]], dimension: int
) -> tuple[MarginalMixtureSpec, ...]:
    if not per_margin:
        return (MarginalMixtureSpec(**shared),) if shared else ()
    outside = sorted(set(per_margin) - set(range(1, dimension + 1)))
    if outside:
        raise ValidationError(
            f"per-margin keys name margin(s) {outside} outside 1..{dimension}"
        )
    return tuple(
        MarginalMixtureSpec(**{**shared, **per_margin.get(index, {})})
        for index in range(1, dimension + 1)
    )


def experiment_spec_from_mapping(values: Mapping[str, str]) -> ExperimentSpec:
    values, per_margin = _split_per_margin(values)
    _check_keys(values, EXPERIMENT_KEYS, "experiment spec")
    typed = _typed(values)
    copula = CopulaSpec(**_pick(typed, COPULA_KEYS))
    fit = FitConfig(seed=typed.get("seed", 0), **_pick(typed, FIT_KEYS - {"seed"}))
    shared = {
        key.removeprefix("marginal_"): value
        for key, value in _pick(typed, MARGINAL_KEYS).items()
    }
    marginals = _marginal_specs(shared, per_margin, copula.dimension)
    return ExperimentSpec(
        copula=copula,
        marginals=marginals,
        fit=fit,
        **_pick(typed, {"n", "seed", "grid_per_dim", "l1_samples"}),
    )


def diagnostics_config_from_mapping(values: Mapping[str, str]) -> DiagnosticsConfig:
    _check_keys(values, DIAGNOSTICS_KEYS, "diagnostics config")
    typed = _typed(values)
    reference_values = {
        key.removeprefix("reference_"): value
        for key, value in values.items()
        if key.startswith("reference_")
    }
    reference = copula_spec_from_mapping(reference_values) if reference_values else None
    return DiagnosticsConfig(
        reference=reference,
        **_pick(typed, {"grid_per_dim", "l1_samples", "ks_samples", "seed", "witnesses"}),
    )


def load_copula_spec(path: Union[str, Path]) -> CopulaSpec:
    return copula_spec_from_mapping(read_spec_file(path))


def load_fit_config(path: Union[str, Path]) -> FitConfig:
    return fit_config_from_mapping(read_spec_file(path))


def load_experiment_spec(path: Union[str, Path]) -> ExperimentSpec:
    return experiment_spec_from_mapping(read_spec_file(path))


def load_diagnostics_config(path: Union[str, Path]) -> DiagnosticsConfig:
    return diagnostics_config_from_mapping(read_spec_file(path))
