"""Epidemiological rate functions on a uniform age-of-infection grid.

A :class:`RateModel` bundles the recovery rate ``gamma`` and transmission
rate ``tau`` together with the derived survival probability

    pi(i) = exp(-integral_0^i gamma(s) ds)

and the infectivity kernel ``omega(i) = tau(i) * pi(i)``, all tabulated on a
uniform grid covering ``[0, min(i_dagger, numeric horizon))``.  The basic
reproduction number is ``S0 * integral omega`` and the Laplace transform of
``omega`` feeds the dispersion relation.

All quadrature in this module (and downstream) is composite trapezoid on the
uniform age grid; the time stepping in :mod:`epiwave.volterra` aligns its step
with this grid so the two compose exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError

# Relative infectivity mass allowed beyond the numeric horizon for
# unbounded-age models, and beyond the grid end for finite maximal age.
OMEGA_TAIL_REL = 1.0e-8
FINITE_AGE_TAIL_REL = 1.0e-6


def trapezoid_weights(n: int, step: float) -> np.ndarray:
    """Composite-trapezoid quadrature weights for ``n`` uniform nodes."""
    if n < 2:
        raise ConfigError("age grid needs at least two nodes")
    w = np.full(n, step)
    w[0] = w[-1] = 0.5 * step
    return w


@dataclass(frozen=True)
class RateModel:
    """Recovery/transmission rates and derived tables on a uniform age grid.

    Attributes
    ----------
    i_dagger : float
        Maximal age of infection; ``math.inf`` when unbounded.
    age_grid : numpy.ndarray
        Uniform nodes ``0 = i_0 < ... < i_M`` with step ``delta_i``, covering
        ``[0, min(i_dagger, numeric horizon)]``.
    pi_tab, omega_tab, tau_tab, gamma_tab : numpy.ndarray
        Tabulated survival probability, infectivity ``tau*pi``, and raw rates
        on ``age_grid``.  ``omega`` is extended by zero past ``i_dagger``.
    tau_sup : float
        Upper bound for ``tau`` (used by step-size contraction estimates).
    preset : str
        One of ``"constant"``, ``"finite_age"``, ``"tabulated"``.
    params : dict
        Constructor parameters, kept so solvers can rebuild a refined model.
    """

    i_dagger: float
    age_grid: np.ndarray
    pi_tab: np.ndarray
    omega_tab: np.ndarray
    tau_tab: np.ndarray
    gamma_tab: np.ndarray
    tau_sup: float
    preset: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("age_grid", "pi_tab", "omega_tab", "tau_tab", "gamma_tab"):
            arr = getattr(self, name)
            arr.setflags(write=False)
        if self.pi_tab[0] != 1.0:
            raise ConfigError("survival probability must start at 1 at age 0")
        if np.any(np.diff(self.pi_tab) > 0):
            raise ConfigError("survival probability must be nonincreasing")
        if np.any(self.omega_tab < 0):
            raise ConfigError("infectivity omega must be nonnegative")

    @property
    def delta_i(self) -> float:
        return float(self.age_grid[1] - self.age_grid[0])

    @property
    def i_max(self) -> float:
        """Right end of the numeric age grid."""
        return float(self.age_grid[-1])

    @property
    def i0(self) -> float:
        """Smallest age with positive transmission rate."""
        nz = np.nonzero(self.tau_tab > 0)[0]
        if nz.size == 0:
            return self.i_max
        return float(self.age_grid[max(nz[0] - 1, 0)])

    @property
    def quad_weights(self) -> np.ndarray:
        return trapezoid_weights(self.age_grid.size, self.delta_i)

    def omega_integral(self) -> float:
        """Quadrature value of ``integral omega`` on the age grid."""
        return float(self.quad_weights @ self.omega_tab)


def _constant_model(tau0: float, gamma0: float, delta_i: float) -> RateModel:
    if tau0 < 0 or gamma0 <= 0:
        raise ConfigError("constant preset needs tau0 >= 0 and gamma0 > 0")
    i_max = -math.log(OMEGA_TAIL_REL) / gamma0
    n = int(math.ceil(i_max / delta_i)) + 1
    ages = np.arange(n) * delta_i
    pi = np.exp(-gamma0 * ages)
    tau = np.full(n, float(tau0))
    return RateModel(
        i_dagger=math.inf,
        age_grid=ages,
        pi_tab=pi,
        omega_tab=tau * pi,
        tau_tab=tau,
        gamma_tab=np.full(n, float(gamma0)),
        tau_sup=float(tau0),
        preset="constant",
        params={"tau0": float(tau0), "gamma0": float(gamma0), "delta_i": float(delta_i)},
    )


def _finite_age_model(tau0: float, i_dagger: float, delta_i: float) -> RateModel:
    if tau0 < 0 or i_dagger <= 0:
        raise ConfigError("finite_age preset needs tau0 >= 0 and i_dagger > 0")
    if delta_i >= i_dagger:
        raise ConfigError("age step must be smaller than the maximal age")
    # The grid stops at i_dagger - delta_i; the omega mass discarded there is
    # (delta_i/i_dagger)^2 of the total, so refine until it is small enough.
    step = delta_i
    while (step / i_dagger) ** 2 >= FINITE_AGE_TAIL_REL:
        step /= 2.0
    n = int(round(i_dagger / step))  # nodes 0 .. i_dagger - step
    ages = np.arange(n) * step
    pi = 1.0 - ages / i_dagger
    tau = np.full(n, float(tau0))
    return RateModel(
        i_dagger=float(i_dagger),
        age_grid=ages,
        pi_tab=pi,
        omega_tab=tau * pi,
        tau_tab=tau,
        gamma_tab=1.0 / (i_dagger - ages),
        tau_sup=float(tau0),
        preset="finite_age",
        params={"tau0": float(tau0), "i_dagger": float(i_dagger), "delta_i": float(delta_i)},
    )


def _tabulated_model(
    ages_in: np.ndarray,
    gamma_in: np.ndarray,
    tau_in: np.ndarray,
    delta_i: float,
    i_dagger: float = math.inf,
) -> RateModel:
    ages_in = np.asarray(ages_in, dtype=float)
    gamma_in = np.asarray(gamma_in, dtype=float)
    tau_in = np.asarray(tau_in, dtype=float)
    if ages_in.ndim != 1 or ages_in.size < 2:
        raise ConfigError("tabulated rates need at least two ages")
    if np.any(np.diff(ages_in) <= 0):
        raise ConfigError("tabulated ages must be strictly increasing")
    if np.any(gamma_in < 0) or np.any(tau_in < 0):
        raise ConfigError("tabulated rates must be nonnegative")
    if ages_in[0] > 0:
        raise ConfigError("tabulated rates must start at age 0")
    # Numeric horizon is the end of the user table (the user certifies the
    # discarded omega tail); resample both rates onto the uniform grid.
    i_max = min(float(ages_in[-1]), i_dagger)
    n = int(math.floor(i_max / delta_i + 1e-12)) + 1
    ages = np.arange(n) * delta_i
    gamma = np.interp(ages, ages_in, gamma_in)
    tau = np.interp(ages, ages_in, tau_in)
    log_pi = np.concatenate(
        [[0.0], -np.cumsum(0.5 * (gamma[1:] + gamma[:-1]) * delta_i)]
    )
    pi = np.exp(log_pi)
    if np.any(pi <= 0) or np.any(np.diff(pi) > 0):
        raise ConfigError("tabulated survival probability must be positive and nonincreasing")
    return RateModel(
        i_dagger=float(i_dagger),
        age_grid=ages,
        pi_tab=pi,
        omega_tab=tau * pi,
        tau_tab=tau,
        gamma_tab=gamma,
        tau_sup=float(tau.max()),
        preset="tabulated",
        params={"delta_i": float(delta_i), "i_dagger": float(i_dagger)},
    )


def build_rate_model(preset: str, delta_i: float, **params) -> RateModel:
    """Build a :class:`RateModel` from a preset descriptor.

    Parameters
    ----------
    preset : str
        ``"constant"`` (params ``tau0``, ``gamma0``), ``"finite_age"``
        (params ``tau0``, ``i_dagger``; recovery rate ``1/(i_dagger - i)``),
        or ``"tabulated"`` (params ``ages``, ``gamma``, ``tau`` arrays and
        optional ``i_dagger``).
    delta_i : float
        Requested uniform age step.  The finite-age preset may refine it so
        that the infectivity mass discarded at the grid end stays below
        ``FINITE_AGE_TAIL_REL`` of the total.
    """
    if delta_i <= 0:
        raise ConfigError("age step must be positive")
    if preset == "constant":
        return _constant_model(params["tau0"], params["gamma0"], delta_i)
    if preset == "finite_age":
        return _finite_age_model(params["tau0"], params["i_dagger"], delta_i)
    if preset == "tabulated":
        return _tabulated_model(
            params["ages"], params["gamma"], params["tau"], delta_i,
            params.get("i_dagger", math.inf),
        )
    raise ConfigError(f"unknown rate preset {preset!r}")


def rebuild_refined(model: RateModel, factor: int = 2) -> RateModel:
    """Rebuild a model with its age step divided by ``factor``."""
    p = dict(model.params)
    step = p.pop("delta_i") / factor
    if model.preset == "tabulated":
        return _tabulated_model(
            model.age_grid, model.gamma_tab, model.tau_tab, step, model.i_dagger
        )
    return build_rate_model(model.preset, step, **p)


def basic_reproduction_number(model: RateModel, s0: float) -> float:
    """``R0 = S0 * integral omega`` by trapezoid quadrature on the age grid."""
    if s0 <= 0:
        raise ConfigError("susceptible density S0 must be positive")
    return s0 * model.omega_integral()


def laplace_omega(model: RateModel, x: float) -> float:
    """Laplace transform ``integral omega(i) exp(-x i) di`` by quadrature.

    Strictly decreasing and convex in ``x >= 0``; equals ``integral omega``
    at ``x = 0``.
    """
    if x < 0:
        raise ValueError("laplace_omega requires x >= 0")
    return float(
        (model.quad_weights * model.omega_tab) @ np.exp(-x * model.age_grid)
    )


def load_rate_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column (age, value) CSV; ``#`` comments, no header needed."""
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ConfigError(f"{path}: expected two columns (age, value)")
    ages, values = data[:, 0], data[:, 1]
    if np.any(np.diff(ages) <= 0):
        raise ConfigError(f"{path}: ages must be strictly increasing")
    return ages, values


def tabulated_from_csv(
    gamma_path, tau_path, delta_i: float, i_dagger: float = math.inf
) -> RateModel:
    """Build a tabulated model from two (age, value) CSV files.

    The two tables may use different age columns; both are resampled onto the
    common uniform grid.  Boundedness and nonnegativity are verified here;
    absolute continuity of a user-supplied ``tau`` cannot be certified from
    samples and is taken on trust.
    """
    g_ages, g_vals = load_rate_table(gamma_path)
    t_ages, t_vals = load_rate_table(tau_path)
    ages = g_ages if g_ages[-1] <= t_ages[-1] else t_ages
    gamma = np.interp(ages, g_ages, g_vals)
    tau = np.interp(ages, t_ages, t_vals)
    return _tabulated_model(ages, gamma, tau, delta_i, i_dagger)


# Closed-form transforms for the presets; used for cross-checks.

def laplace_omega_closed_form(model: RateModel, x: float) -> float | None:
    """Analytic ``L[omega](x)`` when the preset admits one, else ``None``."""
    if model.preset == "constant":
        tau0, gamma0 = model.params["tau0"], model.params["gamma0"]
        return tau0 / (gamma0 + x)
    if model.preset == "finite_age":
        tau0, idag = model.params["tau0"], model.params["i_dagger"]
        if x == 0:
            return tau0 * idag / 2.0
        # integral_0^idag tau0 (1 - i/idag) e^{-x i} di
        return tau0 * (x * idag - 1.0 + math.exp(-x * idag)) / (x * x * idag)
    return None


Preset = Callable[..., RateModel]
