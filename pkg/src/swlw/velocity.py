"""Velocity over one time step and characteristic tracing through it.

Inside a step ``[t_n, t_n + dt]`` every transport sub-solver sees the same
velocity: linear in time from ``u_start`` to ``u_end``. ``s`` is the step
fraction in ``[0, 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CFLViolation
from .grid import Grid


@dataclass(frozen=True)
class VelocityPath:
    grid: Grid
    u_start: np.ndarray
    u_end: np.ndarray

    @classmethod
    def of(cls, grid: Grid, u, u_end=None) -> "VelocityPath":
        if isinstance(u, VelocityPath):
            return u
        u = grid.check(np.asarray(u, dtype=float))
        if u.shape != (2,) + grid.shape:
            raise ValueError(f"velocity must have shape (2, n, n), got {u.shape}")
        u_end = u if u_end is None else grid.check(np.asarray(u_end, dtype=float))
        return cls(grid, u, u_end)

    def at(self, s: float) -> np.ndarray:
        if s == 0.0:
            return self.u_start
        if s == 1.0:
            return self.u_end
        return (1.0 - s) * self.u_start + s * self.u_end

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.u_start) or np.any(self.u_end))

    @cached_property
    def _grad_ends(self):
        g = self.grid
        return g.jacobian_matrix(self.u_start), g.jacobian_matrix(self.u_end)

    def grad_at(self, s: float) -> np.ndarray:
        """``G[i, j] = d_j u_i`` at step fraction ``s``."""
        g0, g1 = self._grad_ends
        return (1.0 - s) * g0 + s * g1

    @cached_property
    def _stack_ends(self):
        # u1, u2, d1u1, d2u1, d1u2, d2u2
        g0, g1 = self._grad_ends
        return (
            np.concatenate([self.u_start, g0.reshape(4, *self.grid.shape)]),
            np.concatenate([self.u_end, g1.reshape(4, *self.grid.shape)]),
        )

    def sample(self, s: float, points: np.ndarray, with_grad: bool = True):
        """Interpolate ``u`` (and ``grad u``) at ``points`` for step fraction ``s``."""
        a, b = self._stack_ends
        fields = (1.0 - s) * a + s * b
        if not with_grad:
            return self.grid.interp(fields[:2], points), None
        vals = self.grid.interp(fields, points)
        return vals[:2], vals[2:].reshape((2, 2) + vals.shape[1:])

    def max_speed(self) -> float:
        return float(
            max(np.max(np.hypot(*self.u_start)), np.max(np.hypot(*self.u_end)))
        )


def check_cfl(path: VelocityPath, dt: float, cfl_max: float | None) -> float:
    """Return the Courant number; raise if it exceeds ``cfl_max``."""
    c = path.max_speed() * dt / path.grid.h
    if cfl_max is not None and c > cfl_max:
        raise CFLViolation(f"Courant number {c:.3g} exceeds cfl_max={cfl_max}; reduce dt")
    return c


def trace(path: VelocityPath, x: np.ndarray, dt: float, *, backward: bool = False,
          B: np.ndarray | None = None, log_j: np.ndarray | None = None):
    """Classical RK4 along characteristics of the step velocity.

    Integrates ``dx/dt = u(x, t)`` together with, optionally, the tangent
    matrix ``dB/dt = grad u(x, t) B`` and ``d(log J)/dt = -div u(x, t)``.
    With ``backward=True`` it starts at ``t_n + dt`` and runs back to ``t_n``
    (positions are departure points; ``log_j`` then accumulates
    ``+int div u``).

    Positions are returned unwrapped; callers wrap as needed.
    """
    need_grad = B is not None or log_j is not None
    sign = -1.0 if backward else 1.0
    fracs = (1.0, 0.5, 0.0) if backward else (0.0, 0.5, 1.0)

    def rhs(s, xs, Bs):
        u, G = path.sample(s, xs, with_grad=need_grad)
        dx = sign * u
        dB = None if Bs is None else sign * np.einsum("ij...,jk...->ik...", G, Bs)
        dl = None if log_j is None else -sign * (G[0, 0] + G[1, 1])
        return dx, dB, dl

    def axpy(base, k, c):
        return None if base is None else base + c * k

    s0, sh, s1 = fracs
    k1 = rhs(s0, x, B)
    k2 = rhs(sh, x + 0.5 * dt * k1[0], axpy(B, k1[1], 0.5 * dt))
    k3 = rhs(sh, x + 0.5 * dt * k2[0], axpy(B, k2[1], 0.5 * dt))
    k4 = rhs(s1, x + dt * k3[0], axpy(B, k3[1], dt))

    def combine(base, idx):
        if base is None:
            return None
        return base + dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx])

    return combine(x, 0), combine(B, 1), combine(log_j, 2)
