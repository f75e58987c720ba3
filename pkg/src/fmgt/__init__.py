"""Spectral solvers and a verification harness for time-fractional
Moore-Gibson-Thompson acoustics.

Subpackages by responsibility:

- ``fractional``: discrete Caputo/Abel operators and coercivity forms
- ``mittag_leffler``: two-parameter Mittag-Leffler functions and relaxation kernels
- ``spectral``: Dirichlet-Laplacian sine bases on intervals and rectangles
- ``models``: the catalog of fractional (J)MGT variants, validation, residuals
- ``volterra``: product-integration marching for the mu-reformulated systems
- ``memory``: wave-with-memory solver for the z-form of the type-II model
- ``analysis``: energy reports, limit studies, kernel and convergence tables
- ``cli``: configuration-driven runs with deterministic CSV/JSON artifacts
"""

from .fractional import (
    EPS_QUAD,
    DomainError,
    FractionalOrder,
    SampledSignal,
    SingularKernel,
    TimeGrid,
    abel_integral,
    alikhanov_gap,
    caputo_derivative,
    coercivity_quadform,
    gamma_kernel,
    limit_discrepancy,
)
from .mittag_leffler import RelaxationKernel, kernel_mass, kernel_value, ml
from .models import (
    Family,
    InitialData,
    MediumParams,
    ModelError,
    ModelSpec,
    ModelVariant,
    Nonlinearity,
    beta_of,
    catalog,
    validate,
)
from .spectral import Domain, EigenBasis, SpectralField

__all__ = [
    "EPS_QUAD",
    "DomainError",
    "FractionalOrder",
    "SampledSignal",
    "SingularKernel",
    "TimeGrid",
    "abel_integral",
    "alikhanov_gap",
    "caputo_derivative",
    "coercivity_quadform",
    "gamma_kernel",
    "limit_discrepancy",
    "ml",
    "RelaxationKernel",
    "kernel_value",
    "kernel_mass",
    "Domain",
    "EigenBasis",
    "SpectralField",
    "Family",
    "InitialData",
    "MediumParams",
    "ModelError",
    "ModelSpec",
    "ModelVariant",
    "Nonlinearity",
    "beta_of",
    "catalog",
    "validate",
]
