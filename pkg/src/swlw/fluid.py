"""Density transport and the barotropic constitutive laws.

``p = a rho**gamma``, ``lambda = b rho**beta``, and the internal energy
``e = a rho**(gamma - 1) / (gamma - 1)`` (antiderivative of ``p / rho**2``
with base point 0, so ``e >= 0``).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Grid
from .velocity import VelocityPath, check_cfl, trace

BETA_THRESHOLD = 4.0 / 3.0


@dataclass(frozen=True)
class FluidParams:
    a: float = 1.0
    gamma: float = 1.4
    mu: float = 0.05
    b: float = 0.05
    beta: float = 2.0

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))
        if self.beta <= BETA_THRESHOLD:
            warnings.warn(beta_warning(self.beta), stacklevel=3)

    def violations(self) -> list[str]:
        out = []
        if not self.a > 0:
            out.append("a must be > 0")
        if not self.gamma > 1:
            out.append("gamma must be > 1")
        if not self.mu > 0:
            out.append("mu must be > 0")
        if not self.b > 0:
            out.append("b must be > 0")
        return out


def beta_warning(beta: float) -> str:
    return f"beta={beta} <= 4/3: no-vacuum guarantee void"


def _positive(rho):
    rho = np.asarray(rho, dtype=float)
    if not np.all(rho > 0):
        raise ValueError("density must be strictly positive")
    return rho


def pressure(rho, params: FluidParams):
    return params.a * _positive(rho) ** params.gamma


def lambda_visc(rho, params: FluidParams):
    return params.b * _positive(rho) ** params.beta


def internal_energy(rho, params: FluidParams):
    return params.a * _positive(rho) ** (params.gamma - 1.0) / (params.gamma - 1.0)


def density_bounds(rho) -> tuple[float, float]:
    rho = np.asarray(rho)
    return float(rho.min()), float(rho.max())


def _continuity_rhs_hat(grid: Grid, rho, u, source=None):
    flux_h = grid.fft(rho[None] * u) * grid.mask
    r = -grid.div_hat(flux_h)
    if source is not None:
        r = r + grid.fft(source)
    return r


def continuity_step_spectral(grid: Grid, rho, u, dt: float, *, u_end=None,
                             cfl_max: float | None = 0.5, source=None, t0: float = 0.0):
    """One SSP-RK3 step of ``rho_t = -div(rho u)`` in conservative spectral form.

    ``source(t)`` (optional) adds a forcing field, used for manufactured solutions.
    The mean of ``rho`` is untouched: the zero mode of a divergence is exactly 0.
    """
    path = VelocityPath.of(grid, u, u_end)
    check_cfl(path, dt, cfl_max)
    rho = grid.check(np.asarray(rho, dtype=float))
    if path.is_zero and source is None:
        return rho.copy()

    def src(s):
        return None if source is None else source(t0 + s * dt)

    rh0 = grid.fft(rho)
    r1 = rh0 + dt * _continuity_rhs_hat(grid, rho, path.at(0.0), src(0.0))
    rho1 = grid.ifft(r1)
    r2 = 0.75 * rh0 + 0.25 * (r1 + dt * _continuity_rhs_hat(grid, rho1, path.at(1.0), src(1.0)))
    rho2 = grid.ifft(r2)
    r3 = rh0 / 3.0 + 2.0 / 3.0 * (r2 + dt * _continuity_rhs_hat(grid, rho2, path.at(0.5), src(0.5)))
    if source is None:
        r3[0, 0] = rh0[0, 0]
    return grid.ifft(r3)


def continuity_step_characteristics(grid: Grid, rho, u, dt: float, *, u_end=None,
                                    cfl_max: float | None = 0.5):
    """Semi-Lagrangian step: ``rho(x) = rho_n(X) exp(-int div u)`` along the
    characteristic ending at ``x``.

    ``log rho`` is interpolated at the departure point, which keeps the update
    strictly positive for positive input.
    """
    path = VelocityPath.of(grid, u, u_end)
    check_cfl(path, dt, cfl_max)
    rho = _positive(grid.check(rho))
    if path.is_zero:
        return rho.copy()
    departure, _, div_int = trace(path, grid.x, dt, backward=True,
                                  log_j=np.zeros(grid.shape))
    return np.exp(grid.interp(np.log(rho), departure) - div_int)
