"""Initial conditions and source terms on the age x space grid.

Bumps are raised-cosine profiles: continuous, compactly supported, and
strictly positive on the interior of their support, which is what the
positivity and comparison properties of the solver assume.  Initial data for
the solver is specified in the normalized variable (density divided by the
survival probability), so no division by ``pi`` happens at run time; the
source term ``I0`` is physical and its normalized cumulative

    I0cum(i, x) = integral_0^i I0(xi, x) / pi(xi) dxi

is tabulated once at setup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .rates import RateModel


def cos_bump(u: np.ndarray, lo: float, hi: float, height: float) -> np.ndarray:
    """Raised-cosine bump supported on ``(lo, hi)`` with peak ``height``."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = (u > lo) & (u < hi)
    out[inside] = height * np.cos(
        np.pi * (u[inside] - 0.5 * (lo + hi)) / (hi - lo)
    ) ** 2
    return out


@dataclass(frozen=True)
class AgeBlock:
    """Dense values over all space for a contiguous band of age rows.

    Rows outside ``[start, start + values.shape[0])`` are zero; this keeps
    compactly supported data cheap on large grids.
    """

    start: int
    values: np.ndarray  # (n_rows, n_x)

    @property
    def stop(self) -> int:
        return self.start + self.values.shape[0]

    def row(self, m: int) -> np.ndarray | None:
        if self.start <= m < self.stop:
            return self.values[m - self.start]
        return None

    def sup(self) -> float:
        return float(np.max(self.values)) if self.values.size else 0.0


@dataclass(frozen=True)
class SpatialBump:
    """Separable bump ``height * bump_x(x) * half_cos(i)`` for initial data.

    The age factor is ``cos^2(pi i / (2 age_width))`` on ``[0, age_width)``:
    positive from age zero, which is the support shape the strict-positivity
    result for nontrivial initial data asks for.
    """

    center: float
    width: float
    height: float
    age_width: float = 1.0

    def build(self, model: RateModel, x_grid: np.ndarray) -> AgeBlock | None:
        if self.height == 0.0 or self.width <= 0.0:
            return None
        if self.age_width <= 0.0:
            raise ConfigError("initial bump age_width must be positive")
        ages = model.age_grid
        n_rows = int(np.searchsorted(ages, self.age_width, side="left"))
        n_rows = max(min(n_rows, ages.size), 1)
        age_profile = np.cos(0.5 * np.pi * ages[:n_rows] / self.age_width) ** 2
        x_profile = cos_bump(
            x_grid, self.center - 0.5 * self.width, self.center + 0.5 * self.width, 1.0
        )
        if not x_profile.any():
            raise ConfigError("initial bump support does not intersect the spatial grid")
        return AgeBlock(0, self.height * age_profile[:, None] * x_profile[None, :])


@dataclass(frozen=True)
class SourceBump:
    """Separable source bump on an age range times a space range."""

    i_range: tuple[float, float]
    x_range: tuple[float, float]
    height: float

    def build(self, model: RateModel, x_grid: np.ndarray) -> AgeBlock | None:
        if self.height == 0.0:
            return None
        i_lo, i_hi = self.i_range
        x_lo, x_hi = self.x_range
        if not (0.0 <= i_lo < i_hi):
            raise ConfigError("source age range must satisfy 0 <= lo < hi")
        ages = model.age_grid
        if i_hi >= ages[-1]:
            raise ConfigError("source age range extends past the numeric age grid")
        if x_lo <= x_grid[0] or x_hi >= x_grid[-1]:
            raise ConfigError("source support extends outside the spatial grid")
        rows = np.nonzero(cos_bump(ages, i_lo, i_hi, 1.0) > 0.0)[0]
        if rows.size == 0:
            return None
        age_profile = cos_bump(ages[rows], i_lo, i_hi, 1.0)
        x_profile = cos_bump(x_grid, x_lo, x_hi, 1.0)
        return AgeBlock(
            int(rows[0]), self.height * age_profile[:, None] * x_profile[None, :]
        )


class CumulativeSource:
    """Tabulated ``I0cum``; rows above the source support are constant."""

    def __init__(self, block: AgeBlock, model: RateModel, n_x: int):
        delta = model.delta_i
        top = block.stop  # first row at/above which I0 vanishes identically
        f = np.zeros((top + 1, n_x))
        for m in range(block.start, top):
            f[m] = block.values[m - block.start] / model.pi_tab[m]
        cum = np.zeros_like(f)
        np.cumsum(0.5 * delta * (f[1:] + f[:-1]), axis=0, out=cum[1:])
        self.values = cum
        self.top = top

    def row(self, m: int) -> np.ndarray:
        return self.values[min(m, self.top)]

    @property
    def final(self) -> np.ndarray:
        return self.values[self.top]

    def sup(self) -> float:
        return float(np.max(self.values))

    def full_table(self, n_age: int) -> np.ndarray:
        """Dense ``(n_age, n_x)`` table; rows past the support repeat the top."""
        out = np.empty((n_age, self.values.shape[1]))
        k = min(self.top + 1, n_age)
        out[:k] = self.values[:k]
        out[k:] = self.values[self.top]
        return out
