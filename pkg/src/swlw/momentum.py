"""Momentum right-hand side, the Lame operator and the linear parabolic solve.

The linear problem solved once per fixed-point application is

    rho v_t + rho (w . grad) v + L_rho v = rhs,
    L_rho v = -div(lambda(rho) (div v) Id + mu (grad v + grad v^T)),

discretised by backward Euler. Splitting ``rho = rho_bar + rho'`` and
``lambda = lambda_bar + lambda'`` leaves a constant-coefficient operator
``M = rho_bar / dt + L_bar`` that is inverted exactly mode by mode; the
variable-coefficient and advective remainders are handled by preconditioned
Richardson iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CouplingSpec
from .errors import InnerSolveDiverged
from .fluid import FluidParams, lambda_visc, pressure
from .grid import Grid


@dataclass(frozen=True)
class MomentumRhs:
    lorentz: np.ndarray
    pressure_grad: np.ndarray
    interaction_grad: np.ndarray
    total: np.ndarray


@dataclass(frozen=True)
class FluxFields:
    F: np.ndarray
    omega: np.ndarray
    Lambda: np.ndarray


@dataclass(frozen=True)
class LinearSolve:
    v: np.ndarray
    iterations: int
    residual: float


def lame_apply(grid: Grid, u, rho, params: FluidParams):
    uh = grid.fft(u)
    div_u = grid.ifft(grid.div_hat(uh))
    lam_div = grid.fft(lambda_visc(rho, params) * div_u) * grid.mask
    kdotu = grid.kd[0] * uh[0] + grid.kd[1] * uh[1]
    out = (-1j * grid.kd * lam_div + params.mu * grid.k2 * uh
           + params.mu * grid.kd * kdotu)
    return grid.ifft(out)


def lorentz_force(grid: Grid, H):
    """``H . grad H - 1/2 grad |H|^2``, dealiased."""
    gH = grid.jacobian_matrix(H)
    tension = grid.fft(H[0] * gH[:, 0] + H[1] * gH[:, 1]) * grid.mask
    mag_p = grid.fft(0.5 * (H[0] ** 2 + H[1] ** 2)) * grid.mask
    return grid.ifft(tension - 1j * grid.kd * mag_p)


def interaction_force(grid: Grid, rho, psi_on_euler, j_over_rho, spec: CouplingSpec):
    """Coupling pressure ``f = alpha g'(1/rho) h(|psi o Y|^2) J/rho`` and its gradient.

    ``j_over_rho`` is normally ``1 / rho_0(y(t, x))``, which equals ``J/rho``
    exactly along particle paths and avoids dividing two evolved fields.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("density must be strictly positive")
    if np.any(np.asarray(j_over_rho) <= 0):
        raise ValueError("J/rho must be strictly positive")
    if spec.alpha == 0:
        z = np.zeros(grid.shape)
        return z, np.zeros((2,) + grid.shape)
    f = spec.alpha * spec.g_prime(1.0 / rho) * spec.h_eval(np.abs(psi_on_euler) ** 2) * j_over_rho
    return f, grid.grad(f)


def assemble_rhs(grid: Grid, rho, H, psi_on_euler, j_over_rho, params: FluidParams,
                 spec: CouplingSpec) -> MomentumRhs:
    lor = lorentz_force(grid, H)
    gp = grid.grad(pressure(rho, params))
    _, gf = interaction_force(grid, rho, psi_on_euler, j_over_rho, spec)
    total = grid.ifft(grid.fft(lor - gp + gf) * grid.mask)
    return MomentumRhs(lorentz=lor, pressure_grad=gp, interaction_grad=gf, total=total)


class _Operator:
    """Discrete backward-Euler momentum operator on spectral velocities."""

    def __init__(self, grid: Grid, rho, u_adv, dt: float, params: FluidParams):
        self.grid, self.dt, self.mu = grid, dt, params.mu
        rho = np.asarray(rho, dtype=float)
        lam = lambda_visc(rho, params)
        self.rho = rho
        self.rho_bar = float(np.mean(rho))
        self.rho_p = rho - self.rho_bar
        self.lam_bar = float(np.mean(lam))
        self.lam_p = lam - self.lam_bar
        self.u_adv = None if u_adv is None or not np.any(u_adv) else np.asarray(u_adv, float)
        k = grid.kd
        kk = k[0] ** 2 + k[1] ** 2
        safe = np.where(kk == 0, 1.0, kk)
        base = self.rho_bar / dt
        perp = 1.0 / (base + self.mu * grid.k2)
        par = 1.0 / (base + self.mu * grid.k2 + (self.lam_bar + self.mu) * kk)
        self._perp, self._par, self._k, self._kk = perp, par, k, safe

    def const_apply(self, vh):
        """``(rho_bar/dt + L_bar) v`` in spectral space."""
        g = self.grid
        kdotv = self._k[0] * vh[0] + self._k[1] * vh[1]
        return ((self.rho_bar / self.dt + self.mu * g.k2) * vh
                + (self.lam_bar + self.mu) * self._k * kdotv)

    def const_solve(self, rh):
        k = self._k
        proj = (k[0] * rh[0] + k[1] * rh[1]) / self._kk
        par = k * proj
        return self._perp * (rh - par) + self._par * par

    def remainder(self, vh):
        """Variable-coefficient and advective part of the operator."""
        g = self.grid
        v = g.ifft(vh)
        acc = self.rho_p[None] * v / self.dt
        if self.u_adv is not None:
            gv = g.ifft(1j * g.kd[None, :] * vh[:, None])
            acc = acc + self.rho[None] * (self.u_adv[0] * gv[:, 0] + self.u_adv[1] * gv[:, 1])
        out = g.fft(acc) * g.mask
        div_v = g.ifft(g.div_hat(vh))
        out = out - 1j * g.kd * (g.fft(self.lam_p * div_v) * g.mask)
        return out

    def apply(self, vh):
        return self.const_apply(vh) + self.remainder(vh)

    def source(self, u_n, rhs):
        g = self.grid
        return self.rho_bar * g.fft(u_n) / self.dt + g.fft(self.rho_p[None] * u_n / self.dt) * g.mask + g.fft(rhs)


def solve_linear_momentum(grid: Grid, rho, u_adv, rhs, u_n, dt: float, params: FluidParams,
                          tol: float = 1e-12, max_inner: int = 200, v0=None) -> LinearSolve:
    """Backward-Euler step of ``rho v_t + rho (u_adv . grad) v + L_rho v = rhs``.

    Iterates ``v <- v + M^{-1} (b - A v)`` until the relative update drops
    below ``tol`` (relative to the larger of ``|v|`` and ``|M^{-1} b|``). ``residual`` is ``|b - A v| / |b|`` in discrete L2.
    """
    op = _Operator(grid, rho, u_adv, dt, params)
    b = op.source(np.asarray(u_n, float), np.asarray(rhs, float))
    bnorm = float(np.sqrt(np.sum(np.abs(b) ** 2)))
    if bnorm == 0.0:
        return LinearSolve(np.zeros((2,) + grid.shape), 0, 0.0)
    first = op.const_solve(b)
    scale = np.sqrt(np.sum(np.abs(first) ** 2))
    vh = first if v0 is None else grid.fft(np.asarray(v0, float))
    it = 0
    for it in range(1, max_inner + 1):
        r = b - op.apply(vh)
        dv = op.const_solve(r)
        vh = vh + dv
        vn = np.sqrt(np.sum(np.abs(vh) ** 2))
        if np.sqrt(np.sum(np.abs(dv) ** 2)) <= tol * max(vn, scale):
            break
    else:
        raise InnerSolveDiverged(
            f"momentum inner iteration did not reach tol={tol} in {max_inner} sweeps; reduce dt"
        )
    res = float(np.sqrt(np.sum(np.abs(b - op.apply(vh)) ** 2)) / bnorm)
    return LinearSolve(grid.ifft(vh), it, res)


def lambda_function(rho, params: FluidParams):
    """``Lambda(rho) = int_1^rho (2 mu + lambda(s)) / s ds``."""
    rho = np.asarray(rho, dtype=float)
    return 2.0 * params.mu * np.log(rho) + params.b * (rho**params.beta - 1.0) / params.beta


def effective_flux(grid: Grid, u, rho, H, f, params: FluidParams) -> FluxFields:
    div_u = grid.div(u)
    F = ((2.0 * params.mu + lambda_visc(rho, params)) * div_u - pressure(rho, params)
         - 0.5 * np.sum(np.asarray(H) ** 2, axis=0) + f)
    return FluxFields(F=F, omega=grid.curl_z(u), Lambda=lambda_function(rho, params))


def lambda_transport_residual(grid: Grid, rho0, rho1, u1, H1, f1, dt: float,
                              params: FluidParams):
    """Backward-difference residual of ``D_t Lambda + (2 mu + lambda) div u = 0``,
    written through the flux: ``D_t Lambda + F + p + |H|^2/2 - f``."""
    lam1 = lambda_function(rho1, params)
    dlam = (lam1 - lambda_function(rho0, params)) / dt
    g = grid.grad(lam1)
    flux = effective_flux(grid, u1, rho1, H1, f1, params)
    return (dlam + u1[0] * g[0] + u1[1] * g[1] + flux.F + pressure(rho1, params)
            + 0.5 * np.sum(np.asarray(H1) ** 2, axis=0) - f1)
