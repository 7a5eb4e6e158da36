"""Readers for data tables, spec files and model documents."""

from .data import read_matrix
from .model import load_model
from .specfile import (
    copula_spec_from_mapping,
    diagnostics_config_from_mapping,
    experiment_spec_from_mapping,
    fit_config_from_mapping,
    load_copula_spec,
    load_diagnostics_config,
    load_experiment_spec,
    load_fit_config,
    parse_key_values,
    read_spec_file,
)

__all__ = [
    "read_matrix",
    "load_model",
    "copula_spec_from_mapping",
    "diagnostics_config_from_mapping",
    "experiment_spec_from_mapping",
    "fit_config_from_mapping",
    "load_copula_spec",
    "load_diagnostics_config",
    "load_experiment_spec",
    "load_fit_config",
    "parse_key_values",
    "read_spec_file",
]
