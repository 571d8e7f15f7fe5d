"""Dispersion relation of the linearized front problem and spreading speed.

The exponential ansatz links a decay rate ``alpha`` and a speed ``c`` through

    phi_c(alpha) = S0 * mgf(alpha) * L[omega](alpha * c),

where ``mgf`` is the kernel transform and ``L[omega]`` the Laplace transform
of the infectivity.  For ``R0 > 1`` each ``alpha`` in ``(0, Lambda)`` carries
a unique speed ``c(alpha)`` solving ``phi_c(alpha) = 1``; the asymptotic
spreading speed is the interior minimum ``c* = c(alpha*)``.  For ``c > c*``
the smaller root ``alpha_c`` of ``phi_c(alpha) = 1`` in ``(0, alpha*]``
gives the tail decay rate of the corresponding front.

All scalar roots are found by bisection: every bisected function here is
monotone in the bisected variable, which makes bisection unconditionally
safe.  Root residuals are driven to 1e-10 and the minimizer is localized to
an interval below 1e-8, negligible against the 5% tolerance used when
comparing with simulated front speeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .kernel import Kernel, log_mgf
from .rates import RateModel, basic_reproduction_number, laplace_omega

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

ROOT_RESIDUAL_TOL = 1.0e-10
MINIMIZER_WIDTH_TOL = 1.0e-8


@dataclass(frozen=True)
class DispersionResult:
    """Spreading speed, its minimizing decay rate, and diagnostics."""

    c_star: float
    alpha_star: float
    alphas: np.ndarray
    c_values: np.ndarray
    phi_residual: float
    dphi_dalpha: float
    lambda_estimated: bool = False


def phi_c(model: RateModel, kernel: Kernel, s0: float, c: float, alpha: float) -> float:
    """Growth factor of the exponential ansatz at speed ``c`` and rate ``alpha``."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if c < 0:
        raise ValueError("speed c must be nonnegative")
    lm = log_mgf(kernel, alpha)
    if math.isinf(lm):
        raise NumericalError(
            f"mgf diverges at alpha={alpha:.6g} (abscissa {kernel.lambda_abscissa:.6g})"
        )
    return s0 * math.exp(lm) * laplace_omega(model, alpha * c)


def c_of_alpha(model: RateModel, kernel: Kernel, s0: float, alpha: float) -> float:
    """Unique speed ``c > 0`` with ``phi_c(alpha) = 1``; requires ``R0 > 1``.

    The bracket is grown geometrically from ``[0, 1]``; ``phi`` is strictly
    decreasing in ``c`` at fixed ``alpha > 0``.
    """
    r0 = basic_reproduction_number(model, s0)
    if r0 <= 1.0:
        raise NumericalError(f"no positive speed root: R0 = {r0:.6g} <= 1")
    if not 0.0 < alpha < kernel.lambda_abscissa:
        raise NumericalError("alpha must lie strictly inside (0, Lambda)")

    def f(c: float) -> float:
        return phi_c(model, kernel, s0, c, alpha) - 1.0

    lo, hi = 0.0, 1.0
    grow = 0
    while f(hi) > 0.0:
        lo, hi = hi, hi * 2.0
        grow += 1
        if grow > 200:
            raise NumericalError("failed to bracket c(alpha)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    if abs(f(c)) > ROOT_RESIDUAL_TOL:
        raise NumericalError(f"c(alpha) residual {abs(f(c)):.3e} above tolerance")
    return c


def _golden_minimize(f, a: float, b: float, tol: float) -> float:
    h = b - a
    c = b - _INV_PHI * h
    d = a + _INV_PHI * h
    yc, yd = f(c), f(d)
    while h > tol:
        if yc < yd:
            b, d, yd = d, c, yc
            h = b - a
            c = b - _INV_PHI * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INV_PHI * h
            yd = f(d)
    return 0.5 * (a + b)


def _sample_alphas(kernel: Kernel, n: int, cap: float) -> np.ndarray:
    lam = kernel.lambda_abscissa
    if math.isfinite(lam):
        return np.geomspace(lam * 1.0e-4, lam * (1.0 - 1.0e-4), n)
    return np.geomspace(1.0e-4, cap, n)


def solve_c_star(
    model: RateModel, kernel: Kernel, s0: float, n_samples: int = 200
) -> DispersionResult:
    """Minimize ``c(alpha)`` over ``(0, Lambda)``.

    Samples a log-spaced grid, checks the minimum is interior, then refines
    with golden-section search.  For kernels with ``Lambda = inf`` the upper
    cap starts at 10 and doubles while ``c`` is still decreasing there (the
    exponential-localization growth bound guarantees eventual increase).
    """
    r0 = basic_reproduction_number(model, s0)
    if r0 <= 1.0:
        raise NumericalError(f"spreading speed undefined: R0 = {r0:.6g} <= 1")

    cap = 10.0
    for _ in range(60):
        alphas = _sample_alphas(kernel, n_samples, cap)
        cs = np.array([c_of_alpha(model, kernel, s0, a) for a in alphas])
        k = int(np.argmin(cs))
        if math.isinf(kernel.lambda_abscissa) and k == n_samples - 1:
            cap *= 2.0
            continue
        break
    else:
        raise NumericalError("alpha search cap kept growing; no interior minimum found")
    if k == 0 or k == n_samples - 1:
        raise NumericalError(
            "c(alpha) minimum sits on the search boundary; abscissa handling is suspect"
        )
    # Unimodality of the sampled map: differences change sign exactly once
    # (decreasing then increasing), ignoring flat ties near the minimum.
    signs = np.sign(np.diff(cs))
    signs = signs[signs != 0]
    if signs.size == 0 or signs[0] >= 0 or np.count_nonzero(np.diff(signs) != 0) != 1:
        raise NumericalError("sampled c(alpha) map is not unimodal")

    alpha_star = _golden_minimize(
        lambda a: c_of_alpha(model, kernel, s0, a),
        alphas[k - 1],
        alphas[k + 1],
        MINIMIZER_WIDTH_TOL,
    )
    c_star = c_of_alpha(model, kernel, s0, alpha_star)
    h = 1.0e-5
    dphi = (
        phi_c(model, kernel, s0, c_star, alpha_star + h)
        - phi_c(model, kernel, s0, c_star, alpha_star - h)
    ) / (2.0 * h)
    residual = abs(phi_c(model, kernel, s0, c_star, alpha_star) - 1.0)
    return DispersionResult(
        c_star=c_star,
        alpha_star=alpha_star,
        alphas=alphas,
        c_values=cs,
        phi_residual=residual,
        dphi_dalpha=float(dphi),
        lambda_estimated=kernel.lambda_estimated,
    )


def alpha_c(
    model: RateModel,
    kernel: Kernel,
    s0: float,
    c: float,
    dispersion: DispersionResult,
    slack: float = 1.0e-10,
) -> float:
    """Decay rate of the supercritical front: the root of ``phi_c = 1`` in
    ``(0, alpha*]``.  Returns ``alpha*`` at ``c = c*``."""
    if c < dispersion.c_star - slack:
        raise NumericalError(
            f"speed {c:.6g} below the spreading speed {dispersion.c_star:.6g}"
        )
    if c <= dispersion.c_star + slack:
        return dispersion.alpha_star

    def f(alpha: float) -> float:
        return phi_c(model, kernel, s0, c, alpha) - 1.0

    lo, hi = 0.0, dispersion.alpha_star  # f(0+) = R0 - 1 > 0, f(alpha*) < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    if abs(f(root)) > ROOT_RESIDUAL_TOL:
        raise NumericalError(f"alpha_c residual {abs(f(root)):.3e} above tolerance")
    return root
