"""Lagrangian coordinates of the flow and the tensors derived from them.

The Eulerian map ``y(t, x)`` is stored as ``x + disp`` with a periodic
displacement so spectral transport applies. Because the initial map is the
identity, the inverse map ``x(t, y)`` coincides with the forward particle flow
started at ``y`` and is tracked by RK4 on particles rather than by inverting
``y``. The deformation gradient ``E = grad_x y`` (Eulerian PDE) and its
inverse ``B = dx/dy`` (ODE along particles) are evolved independently, as is
the Liouville Jacobian ``log J~`` along particles, so each can be checked
against the others.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolated
from .grid import Grid
from .velocity import VelocityPath, check_cfl, trace

J_MIN = 1e-6


@dataclass(frozen=True)
class FlowMapState:
    disp: np.ndarray  # (2, n, n) y - x on the Eulerian grid
    x: np.ndarray  # (2, n, n) particle positions x(t, y), wrapped to [0, 1)
    E: np.ndarray  # (2, 2, n, n) grad_x y on the Eulerian grid
    B: np.ndarray  # (2, 2, n, n) dx/dy on the Lagrangian grid
    log_j: np.ndarray  # (n, n) Liouville log J~ on the Lagrangian grid
    t: float = 0.0

    @classmethod
    def identity(cls, grid: Grid) -> "FlowMapState":
        eye = np.zeros((2, 2) + grid.shape)
        eye[0, 0] = eye[1, 1] = 1.0
        return cls(
            disp=np.zeros((2,) + grid.shape),
            x=grid.x.copy(),
            E=eye,
            B=eye.copy(),
            log_j=np.zeros(grid.shape),
        )

    def y_points(self, grid: Grid) -> np.ndarray:
        return grid.x + self.disp

    @property
    def J(self) -> np.ndarray:
        return det2(self.E)


def det2(M):
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


def opnorm2(M):
    """Pointwise spectral norm of a 2x2 tensor field."""
    fro2 = np.sum(M**2, axis=(0, 1))
    d = det2(M)
    return np.sqrt(0.5 * (fro2 + np.sqrt(np.maximum(fro2**2 - 4.0 * d**2, 0.0))))


def periodic_gap(a, b):
    return np.mod(a - b + 0.5, 1.0) - 0.5


# -- Eulerian transports (SSP-RK3, linear-in-time velocity) ---------------

def _ssprk3(rhs, f0, dt):
    f1 = f0 + dt * rhs(0.0, f0)
    f2 = 0.75 * f0 + 0.25 * (f1 + dt * rhs(1.0, f1))
    return f0 / 3.0 + 2.0 / 3.0 * (f2 + dt * rhs(0.5, f2))


def _advect(grid: Grid, u, f):
    """Dealiased ``u . grad f`` for stacked fields ``f`` of shape ``(..., n, n)``."""
    gf = grid.grad(f)  # (..., 2, n, n)
    return grid.dealias(u[0] * gf[..., 0, :, :] + u[1] * gf[..., 1, :, :])


def advance_y(grid: Grid, disp, u, dt: float, *, u_end=None, cfl_max=0.5):
    """Transport of the map, ``y_t + u . grad y = 0``, on its displacement."""
    path = VelocityPath.of(grid, u, u_end)
    check_cfl(path, dt, cfl_max)
    if path.is_zero:
        return np.array(disp, copy=True)

    def rhs(s, d):
        us = path.at(s)
        return -us - _advect(grid, us, d)

    return _ssprk3(rhs, np.asarray(disp, dtype=float), dt)


def advance_E(grid: Grid, E, u, dt: float, *, u_end=None, cfl_max=0.5):
    """``E_t + u . grad E + E grad u = 0`` with ``(E grad u)_ij = E_ik d_j u_k``."""
    path = VelocityPath.of(grid, u, u_end)
    check_cfl(path, dt, cfl_max)
    if path.is_zero:
        return np.array(E, copy=True)

    def rhs(s, Es):
        us = path.at(s)
        G = path.grad_at(s)
        stretch = grid.dealias(np.einsum("ik...,kj...->ij...", Es, G))
        return -_advect(grid, us, Es) - stretch

    return _ssprk3(rhs, np.asarray(E, dtype=float), dt)


# -- particle ODEs (RK4) ---------------------------------------------------

def advance_particles(grid: Grid, x, u, dt: float, *, u_end=None):
    """``dx/dt = u(t, x)`` for every Lagrangian node; positions wrapped to [0, 1)."""
    path = VelocityPath.of(grid, u, u_end)
    if path.is_zero:
        return np.array(x, copy=True)
    xn, _, _ = trace(path, np.asarray(x, dtype=float), dt)
    return np.mod(xn, 1.0)


def advance_particle_tensors(grid: Grid, x, B, log_j, u, dt: float, *, u_end=None):
    """Joint RK4 for positions, ``dB/dt = grad u(x) B`` and
    ``d log J~/dt = -div u(x)``. Returns ``(x, B, log_j)``."""
    path = VelocityPath.of(grid, u, u_end)
    if path.is_zero:
        return np.array(x, copy=True), np.array(B, copy=True), np.array(log_j, copy=True)
    xn, Bn, lj = trace(path, np.asarray(x, dtype=float), dt, B=np.asarray(B, dtype=float),
                       log_j=np.asarray(log_j, dtype=float))
    return np.mod(xn, 1.0), Bn, lj


def advance_B(grid: Grid, x, B, u, dt: float, *, u_end=None):
    _, Bn, _ = advance_particle_tensors(grid, x, B, np.zeros(grid.shape), u, dt, u_end=u_end)
    return Bn


def advance_map(grid: Grid, state: FlowMapState, u, dt: float, *, u_end=None,
                cfl_max=0.5) -> FlowMapState:
    path = VelocityPath.of(grid, u, u_end)
    disp = advance_y(grid, state.disp, path, dt, cfl_max=cfl_max)
    E = advance_E(grid, state.E, path, dt, cfl_max=None)
    x, B, log_j = advance_particle_tensors(grid, state.x, state.B, state.log_j, path, dt)
    new = FlowMapState(disp=disp, x=x, E=E, B=B, log_j=log_j, t=state.t + dt)
    jacobian(new)
    return new


def jacobian(state: FlowMapState, j_min: float = J_MIN) -> np.ndarray:
    """``det E``; raises if the map degenerates anywhere."""
    J = state.J
    if not np.all(np.isfinite(J)) or J.min() <= j_min:
        raise InvariantViolated(f"Jacobian of the Lagrangian map fell to {J.min():.3e}")
    return J


def liouville_jacobian(state: FlowMapState) -> np.ndarray:
    """``J~(t, y) = J(t, x(t, y))`` integrated along particles."""
    return np.exp(state.log_j)


# -- compositions ----------------------------------------------------------

def compose_to_euler(grid: Grid, f_y, state: FlowMapState):
    """``f(y(t, x))`` on the Eulerian grid."""
    return grid.interp(f_y, state.y_points(grid))


def compose_to_lagr(grid: Grid, f_x, state: FlowMapState):
    """``f(x(t, y))`` on the Lagrangian grid."""
    return grid.interp(f_x, state.x)


# -- consistency metrics ---------------------------------------------------

def inverse_identity_error(grid: Grid, state: FlowMapState) -> float:
    """max over Lagrangian nodes of ``|y(t, x(t, y)) - y|`` (periodic)."""
    y_at_x = state.x + grid.interp(state.disp, state.x)
    return float(np.max(np.abs(periodic_gap(y_at_x, grid.x))))


def eb_identity_error(grid: Grid, state: FlowMapState) -> float:
    """max entry of ``E(x(t, y)) B(t, y) - Id``."""
    Ex = grid.interp(state.E, state.x)
    prod = np.einsum("ik...,kj...->ij...", Ex, state.B)
    prod[0, 0] -= 1.0
    prod[1, 1] -= 1.0
    return float(np.max(np.abs(prod)))


def liouville_gap(grid: Grid, state: FlowMapState) -> float:
    """Relative max gap between ``det E`` composed with ``x`` and Liouville ``J~``."""
    detE_x = grid.interp(state.J, state.x)
    return float(np.max(np.abs(detE_x / liouville_jacobian(state) - 1.0)))


def e_from_y(grid: Grid, state: FlowMapState) -> np.ndarray:
    """Deformation gradient recomputed spectrally from the stored map."""
    E = grid.jacobian_matrix(state.disp)
    E[0, 0] += 1.0
    E[1, 1] += 1.0
    return E


def sobolev_norm(grid: Grid, f, m: int) -> float:
    f = np.asarray(f)
    total = np.mean(f**2)
    if m >= 1:
        total += np.mean(np.sum(grid.grad(f) ** 2, axis=0))
    if m > 1:
        raise ValueError("only orders 0 and 1 are supported")
    return float(np.sqrt(total))


def norm_equivalence_report(grid: Grid, f, state: FlowMapState, m: int = 0,
                            slack: float = 1e-3) -> dict:
    """Ratio of the order-``m`` norms of ``f(x(t, .))`` and ``f``, with the
    change-of-variables bound ``C`` built from measured sup norms of
    ``J``, ``1/J``, ``E`` and ``B``. ``slack`` absorbs interpolation and
    quadrature error (the bound is sharp, ``C = 1``, for area-preserving maps)."""
    if m not in (0, 1):
        raise ValueError("order must be 0 or 1")
    J = jacobian(state)
    f_lagr = compose_to_lagr(grid, f, state)
    ratio = sobolev_norm(grid, f_lagr, m) / sobolev_norm(grid, f, m)
    J_sup, inv_sup = float(J.max()), float((1.0 / J).max())
    if m == 0:
        C = max(np.sqrt(J_sup), np.sqrt(inv_sup))
    else:
        B_sup = float(opnorm2(state.B).max())
        E_sup = float(opnorm2(state.E).max())
        C = max(np.sqrt(J_sup * max(1.0, B_sup**2)), np.sqrt(inv_sup * max(1.0, E_sup**2)))
    return {"order": m, "ratio": float(ratio), "C": float(C),
            "within_bound": bool((1.0 - slack) / C <= ratio <= C * (1.0 + slack))}
