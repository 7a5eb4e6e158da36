"""Core domain contracts and shared abstractions."""

from .contracts import CopulaCdf, CopulaDensity, UnivariateMarginal
from .errors import (
    CopmixError,
    DimensionError,
    DomainError,
    NumericalError,
    StageError,
    UsageError,
    ValidationError,
)
from .unit import UnitPoint, as_unit_array, interior_grid, radial_reflection

__all__ = [
    "CopulaCdf",
    "CopulaDensity",
    "UnivariateMarginal",
    "CopmixError",
    "DimensionError",
    "DomainError",
    "NumericalError",
    "StageError",
    "UsageError",
    "ValidationError",
    "UnitPoint",
    "as_unit_array",
    "interior_grid",
    "radial_reflection",
]
