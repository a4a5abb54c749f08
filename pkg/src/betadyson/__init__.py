"""Beta-Dyson Brownian motion, Jack polynomials and the Dixon-Anderson intertwining kernel."""

__version__ = "0.1.0"

from .partitions import Partition
from .symmpoly import SymPoly
from .jack import JackBasis, JackParams, build_jack, cached_basis, jack_norm
from .operators import Kind, build_generator_matrix, generator_matrix_direct
from .semigroup import (
    exact_jack_moment,
    kernel_factor,
    semigroup,
    verify_generator_intertwining,
    verify_intertwining_exact,
)
from .dixon_anderson import da_moment_exact, da_moment_mc, da_sample
from .stats import Estimate
from .sde import Process, SdeConfig, mc_intertwining, mc_jack_moment, simulate_dbm, simulate_dou
from .rmt import corner_pipeline

__all__ = [
    "Estimate",
    "JackBasis",
    "JackParams",
    "Kind",
    "Partition",
    "Process",
    "SdeConfig",
    "SymPoly",
    "build_generator_matrix",
    "build_jack",
    "cached_basis",
    "corner_pipeline",
    "da_moment_exact",
    "da_moment_mc",
    "da_sample",
    "exact_jack_moment",
    "generator_matrix_direct",
    "jack_norm",
    "kernel_factor",
    "mc_intertwining",
    "mc_jack_moment",
    "semigroup",
    "simulate_dbm",
    "simulate_dou",
    "verify_generator_intertwining",
    "verify_intertwining_exact",
]
