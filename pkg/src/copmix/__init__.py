from .copulas import (
    ArchimedeanFamily,
    ArchimedeanGenerator,
    ClaytonCopula,
    CorrelationMatrix,
    ExampleCopula,
    GaussianCopula,
    GaussianCopulaMixture,
    IndependenceCopula,
)
from .core.errors import (
    CopmixError,
    DimensionError,
    DomainError,
    NumericalError,
    StageError,
    ValidationError,
)
from .core.unit import UnitPoint
from .mixture import CovarianceMode, GaussianMixtureModel, MixtureKind, QRDensity
from .options import CopulaSpec, DiagnosticsConfig, ExperimentSpec, FitConfig
from .transforms import MarginalTransform

__version__ = "0.1.0"
__all__ = [
    "ArchimedeanFamily",
    "ArchimedeanGenerator",
    "ClaytonCopula",
    "CorrelationMatrix",
    "ExampleCopula",
    "GaussianCopula",
    "GaussianCopulaMixture",
    "IndependenceCopula",
    "CopmixError",
    "DimensionError",
    "DomainError",
    "NumericalError",
    "StageError",
    "ValidationError",
    "UnitPoint",
    "CovarianceMode",
    "GaussianMixtureModel",
    "MixtureKind",
    "QRDensity",
    "CopulaSpec",
    "DiagnosticsConfig",
    "ExperimentSpec",
    "FitConfig",
    "MarginalTransform",
]
