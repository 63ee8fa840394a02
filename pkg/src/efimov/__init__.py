"""Efimov-effect constants for two identical fermions and a third particle.

Closed-form mass constants (:mod:`efimov.params`), channel kernels and Fourier
symbols (:mod:`efimov.kernels`), level-set measures and the Efimov constant
with its bounds (:mod:`efimov.constants`), and Nyström eigenvalue counting for
the truncated channel operators (:mod:`efimov.spectral`).
"""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, EfimovError, ResourceCapError
from .params import MassParams, critical_mass, make_params
from .kernels import ChannelSymbol, kernel_channel, kernel_full, legendre, symbol_hat, symbol_upper_bound
from .constants import EfimovReport, LevelSet, efimov_constant, level_set
from .spectral import Discretization, SpectralRun, count_above, run_counting

__all__ = [
    "ChannelSymbol", "ConvergenceError", "Discretization", "DomainError", "EfimovError",
    "EfimovReport", "LevelSet", "MassParams", "ResourceCapError", "SpectralRun",
    "count_above", "critical_mass", "efimov_constant", "kernel_channel", "kernel_full",
    "legendre", "level_set", "make_params", "run_counting", "symbol_hat", "symbol_upper_bound",
]
