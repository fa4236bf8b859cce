"""Bosonic character of composite particles made of two fermions or two bosons."""

from .coboson import (
    ChiTable,
    QualityReport,
    Statistics,
    alpha,
    asymptotic_ratio,
    chi_geometric_closed,
    chi_table,
    epsilon_norm_sq,
    normalization_ratio,
    quality_report,
)
from .schmidt import (
    GaussianParams,
    SchmidtSpectrum,
    WaveFunctionGrid,
    build_gaussian_grid,
    entanglement_entropy,
    geometric_spectrum,
    k_from_z,
    schmidt_decompose,
    schmidt_number,
    uniform_spectrum,
    z_from_k,
    z_from_widths,
)

__version__ = "0.1.0"
