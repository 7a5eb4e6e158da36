"""Reference copula families."""

from .archimedean import (
    ArchimedeanFamily,
    ArchimedeanGenerator,
    LatentSampler,
    archimedean_cdf,
    kimberling_sample,
    sample_latent,
)
from .elliptical import (
    CorrelationMatrix,
    GaussianCopula,
    GaussianCopulaMixture,
    gaussian_copula_density,
    mixture_density,
    nearest_correlation,
    sample_gaussian_copula,
)
from .reference import (
    ClaytonCopula,
    ExampleCopula,
    IndependenceCopula,
    clayton_cdf,
    clayton_density,
    example_copula_cdf,
    example_copula_conditional,
    example_copula_density,
    sample_example_copula,
)

__all__ = [
    "ArchimedeanFamily",
    "ArchimedeanGenerator",
    "LatentSampler",
    "archimedean_cdf",
    "kimberling_sample",
    "sample_latent",
    "CorrelationMatrix",
    "GaussianCopula",
    "GaussianCopulaMixture",
    "gaussian_copula_density",
    "mixture_density",
    "nearest_correlation",
    "sample_gaussian_copula",
    "ClaytonCopula",
    "ExampleCopula",
    "IndependenceCopula",
    "clayton_cdf",
    "clayton_density",
    "example_copula_cdf",
    "example_copula_conditional",
    "example_copula_density",
    "sample_example_copula",
]
