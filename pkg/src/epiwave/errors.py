"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures (failed brackets, residuals, non-convergence) with 3.
"""

from __future__ import annotations


class EpiwaveError(Exception):
    """Base class for all epiwave-specific errors."""


class ConfigError(EpiwaveError):
    """Invalid configuration, preset parameters, or input files."""


class NumericalError(EpiwaveError):
    """A numerical procedure failed to meet its contract (bracket, residual,
    convergence, or domain-size requirement)."""
