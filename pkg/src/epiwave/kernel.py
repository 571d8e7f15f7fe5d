"""Spatial interaction kernels: 1-D marginal, moment generating function,
exponential-localization abscissa, and linear convolution.

Only everywhere-positive kernels are admitted; compactly supported tables are
rejected at construction (zero values would break the strict-positivity
assumptions the solvers rely on).  The 1-D marginal ``k0`` is even and
normalized to unit mass; ``mgf(mu) = integral k0(z) exp(mu z) dz`` is finite
exactly on ``(-Lambda, Lambda)``.

Convolution is linear (zero-padded FFT), never circular: fronts are not
periodic and wraparound would pollute the leading edge.  Fields can be
extended beyond each boundary either by their edge value (the default inside
the simulator, where the solution plateaus behind the front) or by zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import signal, special
from scipy.fft import next_fast_len

from .errors import ConfigError, NumericalError

# Kernel mass allowed outside the truncation radius used for discrete taps.
EPS_TRUNCATION = 1.0e-10


@dataclass(frozen=True)
class Kernel:
    """Even, positive, unit-mass 1-D interaction density.

    Attributes
    ----------
    family : str
        ``"gaussian"``, ``"laplace"`` or ``"tabulated"``.
    k0 : callable
        Vectorized evaluation of the marginal density.
    lambda_abscissa : float
        ``Lambda = sup {mu >= 0 : mgf(mu) < inf}``; ``math.inf`` for
        super-exponentially localized kernels.
    support_radius_eps : float
        Radius outside which the truncated mass is below ``EPS_TRUNCATION``.
    lambda_estimated : bool
        True when ``Lambda`` was fitted from a finite table rather than known
        in closed form; downstream results carry this flag.
    """

    family: str
    k0: Callable[[np.ndarray], np.ndarray]
    lambda_abscissa: float
    support_radius_eps: float
    params: dict = field(default_factory=dict)
    lambda_estimated: bool = False

    def truncation_radius(self, eps: float = EPS_TRUNCATION) -> float:
        """Radius holding all but ``eps`` of the kernel mass."""
        if self.family == "gaussian":
            return self.params["sigma"] * math.sqrt(2.0) * special.erfcinv(eps)
        if self.family == "laplace":
            return -self.params["b"] * math.log(eps)
        return self.support_radius_eps


def gaussian_kernel(sigma: float) -> Kernel:
    if sigma <= 0:
        raise ConfigError("gaussian kernel needs sigma > 0")

    def k0(z):
        z = np.asarray(z, dtype=float)
        return np.exp(-0.5 * (z / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))

    radius = sigma * math.sqrt(2.0) * special.erfcinv(EPS_TRUNCATION)
    return Kernel(
        family="gaussian",
        k0=k0,
        lambda_abscissa=math.inf,
        support_radius_eps=radius,
        params={"sigma": float(sigma)},
    )


def laplace_kernel(b: float) -> Kernel:
    if b <= 0:
        raise ConfigError("laplace kernel needs scale b > 0")

    def k0(z):
        z = np.asarray(z, dtype=float)
        return np.exp(-np.abs(z) / b) / (2.0 * b)

    return Kernel(
        family="laplace",
        k0=k0,
        lambda_abscissa=1.0 / b,
        support_radius_eps=-b * math.log(EPS_TRUNCATION),
        params={"b": float(b)},
    )


def _fit_tail_rate(z: np.ndarray, values: np.ndarray) -> tuple[float, bool]:
    """Estimate the exponential tail rate from the last decade of values.

    Returns ``(Lambda, estimated=True)``.  A kernel whose log-tail steepens
    (super-exponential curvature, Gaussian-type) reports ``Lambda = inf``.
    """
    vmin = values[-1]
    window = np.nonzero(values <= 10.0 * vmin)[0]
    if window.size < 4:
        window = np.arange(max(values.size - 4, 0), values.size)
    zw, lw = z[window], np.log(values[window])
    half = window.size // 2
    s1 = np.polyfit(zw[:half], lw[:half], 1)[0]
    s2 = np.polyfit(zw[half:], lw[half:], 1)[0]
    if abs(s2) > 1.25 * abs(s1):
        return math.inf, True
    slope = np.polyfit(zw, lw, 1)[0]
    return abs(float(slope)), True


def tabulated_kernel(z: np.ndarray, values: np.ndarray) -> Kernel:
    """Even kernel from samples on ``z >= 0``, mirrored to ``z < 0``.

    Normalization is enforced by rescaling, with a warning when the stored
    mass is off by more than 1e-3.
    """
    z = np.asarray(z, dtype=float)
    values = np.asarray(values, dtype=float)
    if z.ndim != 1 or z.size < 4:
        raise ConfigError("tabulated kernel needs at least four samples")
    if z[0] != 0.0 or np.any(np.diff(z) <= 0):
        raise ConfigError("tabulated kernel needs strictly increasing z starting at 0")
    if np.any(values <= 0):
        raise ConfigError(
            "kernel values must be strictly positive everywhere; compactly "
            "supported kernels are not admitted"
        )
    mass = 2.0 * float(np.trapezoid(values, z))  # even extension
    if abs(mass - 1.0) > 1.0e-3:
        warnings.warn(
            f"tabulated kernel mass {mass:.6g} != 1; rescaling", stacklevel=2
        )
    values = values / mass
    lam, estimated = _fit_tail_rate(z, values)

    def k0(x):
        x = np.asarray(x, dtype=float)
        return np.interp(np.abs(x), z, values, right=0.0)

    return Kernel(
        family="tabulated",
        k0=k0,
        lambda_abscissa=lam,
        support_radius_eps=float(z[-1]),
        params={"z": z, "values": values},
        lambda_estimated=estimated,
    )


def tabulated_kernel_from_csv(path) -> Kernel:
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ConfigError(f"{path}: expected two columns (z, k0)")
    return tabulated_kernel(data[:, 0], data[:, 1])


def log_mgf(kernel: Kernel, mu: float) -> float:
    """``log mgf(mu)``; ``inf`` when the transform diverges.

    Computing in log space keeps the dispersion and far-field solvers safe
    from overflow at large ``mu``.
    """
    mu = float(mu)
    if kernel.family == "gaussian":
        s = kernel.params["sigma"]
        return 0.5 * (s * mu) ** 2
    if kernel.family == "laplace":
        b = kernel.params["b"]
        if abs(mu) >= 1.0 / b:
            return math.inf
        return -math.log1p(-(b * mu) ** 2)
    # Tabulated: quadrature over the even extension, with a conservative
    # divergence test on the tail estimate.
    if abs(mu) >= kernel.lambda_abscissa:
        return math.inf
    z = kernel.params["z"]
    v = kernel.params["values"]
    # Even extension: integral_{-a}^{a} k0 e^{mu z} = integral_0^a 2 k0 cosh(mu z).
    val = float(np.trapezoid(2.0 * v * np.cosh(mu * z), z))
    lam = kernel.lambda_abscissa
    if math.isfinite(lam):
        tail = v[-1] * math.exp(abs(mu) * z[-1]) / max(lam - abs(mu), 1e-300)
        if tail > 1.0e-6 * val:
            return math.inf
    return math.log(val)


def mgf(kernel: Kernel, mu: float) -> float:
    """Moment generating function ``integral k0(z) e^{mu z} dz``.

    Returns ``math.inf`` outside the finiteness interval ``(-Lambda, Lambda)``.
    """
    lm = log_mgf(kernel, mu)
    return math.inf if math.isinf(lm) else math.exp(lm)


def discrete_taps(kernel: Kernel, dx: float, eps: float = EPS_TRUNCATION) -> np.ndarray:
    """Sampled kernel weights on offsets ``-J..J`` times ``dx``, unit sum.

    The taps are renormalized so that convolving a constant field returns the
    constant exactly.
    """
    if dx <= 0:
        raise ConfigError("grid step dx must be positive")
    radius = kernel.truncation_radius(eps)
    j = int(math.ceil(radius / dx))
    offsets = np.arange(-j, j + 1) * dx
    taps = kernel.k0(offsets) * dx
    total = taps.sum()
    if total <= 0:
        raise NumericalError("kernel taps sum to zero; grid step too coarse")
    return taps / total


def extend_field(field: np.ndarray, pad: int, extension: str) -> np.ndarray:
    if extension == "constant":
        return np.concatenate(
            [np.full(pad, field[0]), field, np.full(pad, field[-1])]
        )
    if extension == "zero":
        return np.concatenate([np.zeros(pad), field, np.zeros(pad)])
    raise ConfigError(f"unknown extension {extension!r}")


def convolve_field(
    kernel: Kernel,
    field: np.ndarray,
    dx: float,
    extension: str = "constant",
    method: str = "fft",
) -> np.ndarray:
    """Discrete linear convolution of ``field`` with the kernel on its grid.

    ``extension`` controls how the field is continued beyond each boundary
    before convolving; the result is sampled on the same grid.  ``method``
    selects the zero-padded FFT path or a direct summation path; the two must
    agree to round-off and the direct path doubles as the oracle in tests.
    """
    field = np.asarray(field, dtype=float)
    taps = discrete_taps(kernel, dx)
    pad = taps.size // 2
    if field.size < taps.size:
        raise ConfigError(
            f"field of length {field.size} is shorter than the kernel "
            f"truncation width {taps.size}"
        )
    padded = extend_field(field, pad, extension)
    if method == "fft":
        out = signal.fftconvolve(padded, taps, mode="valid")
    elif method == "direct":
        out = np.convolve(padded, taps, mode="valid")
    else:
        raise ConfigError(f"unknown convolution method {method!r}")
    if np.any(np.isnan(out)):
        raise NumericalError("NaN in convolution output")
    return out


class PlannedConvolution:
    """Reusable FFT plan for repeated convolutions with fixed taps/length.

    Solvers convolve thousands of fields of identical length with the same
    kernel taps; precomputing the taps' transform and using a fixed fast FFT
    length keeps the per-call cost to two transforms.
    """

    def __init__(self, taps: np.ndarray, n_field: int, extension: str = "constant"):
        self.taps = np.asarray(taps, dtype=float)
        self.pad = self.taps.size // 2
        self.n_field = n_field
        self.extension = extension
        self.n_padded = n_field + 2 * self.pad
        self.nfft = next_fast_len(self.n_padded + self.taps.size - 1)
        self._taps_hat = np.fft.rfft(self.taps, self.nfft)

    def __call__(self, field: np.ndarray) -> np.ndarray:
        padded = extend_field(field, self.pad, self.extension)
        out = np.fft.irfft(np.fft.rfft(padded, self.nfft) * self._taps_hat, self.nfft)
        # 'valid' part: taps fully inside the padded field.
        start = 2 * self.pad
        return out[start : start + self.n_field]
