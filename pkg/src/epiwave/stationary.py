"""Stationary states: homogeneous plateau, heterogeneous profile, far field.

With ``R0 > 1`` the spatially homogeneous steady state of the normalized
boundary trace is the unique positive root ``rho*`` of ``v = 1 - e^{-R0 v}``;
the full homogeneous profile is ``rho_s(i) = S0 rho* pi(i)``.  With a
compactly supported source ``I0`` the steady state is heterogeneous: writing
``phi_hat(x)`` for the boundary value over ``S0``, it solves the fixed-point
equation

    phi_hat = 1 - A(x) * exp(-R0 * (K * phi_hat)(x)),

where ``A(x) = exp(-integral omega(i) (K * I0cum(i, .))(x) di)`` collects the
source contribution, and the full profile is reconstructed along ages by
``U(i, x) = pi(i) * (S0 phi_hat(x) + I0cum(i, x))``.

Far from the source, ``phi_hat`` approaches its homogeneous limit at an
exponential rate ``lambda`` that depends (weakly) on the distance; at a given
distance ``r`` it solves

    e^{R0 rho*} e^{-lambda r} = 1 - exp(-R0 * mgf(lambda) * e^{-lambda r}),

with a unique root in ``(0, Lambda)`` once ``r`` is large enough for the two
sides to cross.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .kernel import Kernel, PlannedConvolution, discrete_taps, log_mgf
from .rates import RateModel

RHO_STAR_RESIDUAL_TOL = 1.0e-12
LAMBDA_RESIDUAL_TOL = 1.0e-10
MAX_SWEEPS = 100_000


def solve_rho_star(r0: float) -> float:
    """Unique root of ``v = 1 - e^{-R0 v}`` in ``(0, 1)``; zero for ``R0 <= 1``.

    Bisection localizes the root, a few Newton steps polish it to a residual
    below 1e-12.
    """
    if r0 <= 0.0:
        raise ValueError("R0 must be positive")
    if r0 <= 1.0:
        return 0.0

    def f(v: float) -> float:
        return v - 1.0 + math.exp(-r0 * v)

    lo, hi = 1.0e-12, 1.0  # f < 0 just right of 0 since f'(0) = 1 - R0 < 0
    while f(lo) >= 0.0:
        lo *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    for _ in range(5):
        v -= f(v) / (1.0 - r0 * math.exp(-r0 * v))
    if abs(f(v)) > RHO_STAR_RESIDUAL_TOL:
        raise NumericalError(f"rho* residual {abs(f(v)):.3e} above tolerance")
    return v


@dataclass
class StationaryState:
    """Heterogeneous stationary solution on a spatial grid.

    ``phi_hat`` is the normalized boundary value ``U(0, x) / S0``; the full
    field along ages is ``U(i, x) = pi(i) (S0 phi_hat(x) + I0cum(i, x))``.
    """

    rho_star: float
    rho_s_tab: np.ndarray
    phi_hat: np.ndarray
    x_grid: np.ndarray
    s0: float
    sweeps: int
    lambda_of_x: dict[float, float] = field(default_factory=dict)
    _i0cum: np.ndarray | None = None  # (n_age, n_x) cumulative source, or None

    def u_field(self, model: RateModel) -> np.ndarray:
        """Stationary ``U(i, x)`` on the age x space grid."""
        base = self.s0 * self.phi_hat[None, :]
        if self._i0cum is not None:
            base = base + self._i0cum
        return model.pi_tab[:, None] * base


def source_log_weight(
    i0cum: np.ndarray | None,
    model: RateModel,
    kernel: Kernel,
    dx: float,
) -> np.ndarray | None:
    """``integral omega(i) (K * I0cum(i, .))(x) di`` on the spatial grid.

    This is both ``-log A(x)`` for the stationary fixed point and the
    large-time limit of the source term in the renewal equation.  Returns
    ``None`` for a vanishing source.
    """
    if i0cum is None:
        return None
    taps = discrete_taps(kernel, dx)
    plan = PlannedConvolution(taps, i0cum.shape[1], extension="zero")
    w = model.quad_weights * model.omega_tab
    # I0cum is constant in age above the source support; convolving the last
    # row once covers that whole tail.
    rows_differ = np.nonzero(np.any(np.diff(i0cum, axis=0) != 0.0, axis=1))[0]
    top = int(rows_differ[-1]) + 1 if rows_differ.size else 0
    out = np.zeros(i0cum.shape[1])
    for m in range(top + 1):
        if w[m] != 0.0 and np.any(i0cum[m] != 0.0):
            out += w[m] * plan(i0cum[m])
    if top + 1 < w.size:
        tail_weight = float(w[top + 1 :].sum())
        if tail_weight != 0.0 and np.any(i0cum[top] != 0.0):
            out += tail_weight * plan(i0cum[top])
    return out


def solve_U(
    model: RateModel,
    kernel: Kernel,
    s0: float,
    i0cum: np.ndarray | None,
    x_grid: np.ndarray,
    tol: float = 1.0e-10,
    max_sweeps: int = MAX_SWEEPS,
) -> StationaryState:
    """Heterogeneous stationary profile by monotone fixed-point iteration.

    Starts from the constant 1, a supersolution (``phi_hat < 1`` always), so
    the sweep is pointwise nonincreasing and hence convergent; iterating from
    below would need the subsolution machinery instead.  Stops when the sup
    change drops below ``tol``.
    """
    r0 = s0 * model.omega_integral()
    dx = float(x_grid[1] - x_grid[0])
    g = source_log_weight(i0cum, model, kernel, dx)
    a_of_x = np.exp(-g) if g is not None else np.ones(x_grid.size)
    taps = discrete_taps(kernel, dx)
    plan = PlannedConvolution(taps, x_grid.size, extension="constant")

    phi = np.ones(x_grid.size)
    sweeps = 0
    while sweeps < max_sweeps:
        phi_new = 1.0 - a_of_x * np.exp(-r0 * plan(phi))
        change = float(np.max(np.abs(phi_new - phi)))
        if np.any(phi_new > phi + 1.0e-14):
            raise NumericalError("stationary sweep lost monotonicity")
        phi = phi_new
        sweeps += 1
        if change < tol:
            break
    else:
        raise NumericalError(f"stationary iteration did not converge in {max_sweeps} sweeps")

    rho_star = solve_rho_star(r0) if r0 > 1.0 else 0.0
    return StationaryState(
        rho_star=rho_star,
        rho_s_tab=s0 * rho_star * model.pi_tab,
        phi_hat=phi,
        x_grid=np.asarray(x_grid, dtype=float),
        s0=s0,
        sweeps=sweeps,
        _i0cum=i0cum,
    )


def solve_lambda(kernel: Kernel, r0: float, rho_star: float, x_norm: float) -> float:
    """Exponential approach rate of the stationary profile at distance ``x_norm``.

    Solves ``h1(lam) = h2(lam)`` with ``h1 = e^{R0 rho*} e^{-lam r}``
    (decreasing from a value above 1) and
    ``h2 = 1 - exp(-R0 mgf(lam) e^{-lam r})`` (tending to 1 with ``lam``),
    by bisection on the sign of ``h1 - h2``.  Uses ``rho_star = 0`` for the
    subcritical branch.
    """
    if x_norm <= 0:
        raise ValueError("x_norm must be positive")
    lam_cap = kernel.lambda_abscissa

    def diff(lam: float) -> float:
        h1 = math.exp(r0 * rho_star - lam * x_norm)
        expo = log_mgf(kernel, lam) - lam * x_norm
        if math.isinf(expo):
            return h1 - 1.0
        h2 = -math.expm1(-r0 * math.exp(expo))
        return h1 - h2

    # diff(0+) > 0; scan geometrically for a sign change inside (0, Lambda).
    lo = 1.0e-8
    hi = None
    lam = 1.0e-3
    limit = lam_cap if math.isfinite(lam_cap) else 16.0 * max(1.0, x_norm)
    while lam < limit:
        lam = min(lam * 1.5, limit * (1.0 - 1.0e-12))
        if diff(lam) < 0.0:
            hi = lam
            break
        lo = lam
    if hi is None:
        raise NumericalError(
            f"no decay-rate crossing below the abscissa; x_norm={x_norm:.6g} too small"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if diff(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    if abs(diff(lam)) > LAMBDA_RESIDUAL_TOL:
        raise NumericalError(f"decay-rate residual {abs(diff(lam)):.3e} above tolerance")
    return lam
