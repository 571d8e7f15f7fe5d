"""Nonlocal age-of-infection epidemic waves.

Simulation of a Kermack-McKendrick model with nonlocal spatial interactions:
renewal-equation time stepping of the cumulative infected density, its
stationary states, asymptotic spreading speed, and traveling-wave profiles,
cross-validated against each other and against independent oracles.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import ConfigError, EpiwaveError, NumericalError
from .kernel import Kernel, convolve_field, gaussian_kernel, laplace_kernel, mgf, tabulated_kernel
from .rates import RateModel, basic_reproduction_number, build_rate_model, laplace_omega

__all__ = [
    "ConfigError",
    "EpiwaveError",
    "NumericalError",
    "Kernel",
    "RateModel",
    "basic_reproduction_number",
    "build_rate_model",
    "convolve_field",
    "gaussian_kernel",
    "laplace_kernel",
    "laplace_omega",
    "mgf",
    "tabulated_kernel",
]
