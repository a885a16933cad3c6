"""Dirichlet character paths and their random multiplicative model."""

from .dirichlet import Character, PrimeContext, build_context, gauss_sum
from .moments import M_limit, MomentResult, MomentSpec, Mq_direct, Mq_sigma
from .paths import PathGrid, fourier_path, path_value, sample_path
from .randomseries import SeriesSpec, Truncation, sample_ensemble
from .stats import TailCurve, phi_limit, phi_q
from .steinhaus import SeedSpec, SteinhausSampler

__version__ = "0.1.0"

__all__ = [
    "Character",
    "M_limit",
    "MomentResult",
    "MomentSpec",
    "Mq_direct",
    "Mq_sigma",
    "PathGrid",
    "PrimeContext",
    "SeedSpec",
    "SeriesSpec",
    "SteinhausSampler",
    "TailCurve",
    "Truncation",
    "build_context",
    "fourier_path",
    "gauss_sum",
    "path_value",
    "phi_limit",
    "phi_q",
    "sample_ensemble",
    "sample_path",
]
