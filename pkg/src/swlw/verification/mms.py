"""Manufactured solutions and convergence studies.

Sources are written out in closed form (derivatives taken by hand); the test
suite checks them against symbolic differentiation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coupling import CouplingSpec
from ..fluid import FluidParams, continuity_step_spectral, lambda_visc
from ..grid import Grid
from ..momentum import lame_apply, solve_linear_momentum
from ..schrodinger import nls_step, potential
from ..scenarios import smooth_random
from ..state import ModelParams
from ..stepper import StepConfig, run
from .oracles import nls_reference

TWO_PI = 2.0 * np.pi


def observed_orders(errors, ratio: float = 2.0) -> list[float]:
    e = np.asarray(errors, dtype=float)
    return [float(np.log(e[i] / e[i + 1]) / np.log(ratio)) for i in range(len(e) - 1)]


@dataclass(frozen=True)
class Study:
    name: str
    steps: tuple[float, ...]
    errors: tuple[float, ...]

    @property
    def orders(self) -> list[float]:
        return observed_orders(self.errors)

    def as_dict(self) -> dict:
        return {"name": self.name, "dt": list(self.steps), "error": list(self.errors),
                "order": self.orders}


# -- continuity ----------------------------------------------------------------

CONT_AMP = 0.2


def continuity_velocity(grid: Grid):
    x1, x2 = grid.x
    return np.stack([0.3 + 0.1 * np.sin(TWO_PI * x1), 0.2 * np.cos(TWO_PI * x1)])


def continuity_exact(grid: Grid, t: float):
    x1, x2 = grid.x
    return 1.0 + CONT_AMP * np.cos(3 * t) * np.sin(TWO_PI * (x1 + x2))


def continuity_source(grid: Grid, t: float):
    """``rho_t + u . grad rho + rho div u`` for :func:`continuity_exact`."""
    x1, x2 = grid.x
    ph = TWO_PI * (x1 + x2)
    rho = continuity_exact(grid, t)
    rho_t = -3 * CONT_AMP * np.sin(3 * t) * np.sin(ph)
    drho = CONT_AMP * np.cos(3 * t) * TWO_PI * np.cos(ph)  # both partials
    u = continuity_velocity(grid)
    div_u = 0.1 * TWO_PI * np.cos(TWO_PI * x1)
    return rho_t + (u[0] + u[1]) * drho + rho * div_u


def continuity_error(n: int, dt: float, t_end: float) -> float:
    g = Grid(n)
    u = continuity_velocity(g)
    rho = continuity_exact(g, 0.0)
    steps = int(round(t_end / dt))
    for i in range(steps):
        rho = continuity_step_spectral(g, rho, u, dt, t0=i * dt,
                                       source=lambda t: continuity_source(g, t))
    return float(np.max(np.abs(rho - continuity_exact(g, steps * dt))))


def continuity_study(n: int = 16, t_end: float = 0.5, dts=(0.05, 0.025, 0.0125)) -> Study:
    return Study("continuity", tuple(dts), tuple(continuity_error(n, dt, t_end) for dt in dts))


# -- momentum ------------------------------------------------------------------

MOM_EPS = 0.3
MOM_FREQ = 3.0


def momentum_density(grid: Grid):
    return 1.0 + MOM_EPS * np.sin(TWO_PI * grid.x[0])


def momentum_advector(grid: Grid):
    x1 = grid.x[0]
    return np.stack([np.full(grid.shape, 0.3), 0.2 * np.cos(TWO_PI * x1)])


def momentum_profile(grid: Grid):
    """``U = (sin a x1 cos a x2, sin a x2)`` with ``a = 2 pi``."""
    x1, x2 = grid.x
    a = TWO_PI
    return np.stack([np.sin(a * x1) * np.cos(a * x2), np.sin(a * x2)])


def momentum_lame_exact(grid: Grid, params: FluidParams):
    """``L_rho U`` in closed form for :func:`momentum_density` and :func:`momentum_profile`."""
    x1, x2 = grid.x
    a, mu = TWO_PI, params.mu
    rho = momentum_density(grid)
    lam = lambda_visc(rho, params)
    dlam1 = params.b * params.beta * rho ** (params.beta - 1) * MOM_EPS * a * np.cos(a * x1)
    div = a * np.cos(a * x2) * (np.cos(a * x1) + 1.0)
    gdiv = np.stack([-a * a * np.sin(a * x1) * np.cos(a * x2),
                     -a * a * np.sin(a * x2) * (np.cos(a * x1) + 1.0)])
    U = momentum_profile(grid)
    lapU = np.stack([-2 * a * a * U[0], -a * a * U[1]])
    grad_lam = np.stack([dlam1, np.zeros(grid.shape)])
    return -(div * grad_lam + lam * gdiv) - mu * lapU - mu * gdiv


def momentum_advection_exact(grid: Grid):
    """``(w . grad) U`` in closed form."""
    x1, x2 = grid.x
    a = TWO_PI
    w = momentum_advector(grid)
    d1U = np.stack([a * np.cos(a * x1) * np.cos(a * x2), np.zeros(grid.shape)])
    d2U = np.stack([-a * np.sin(a * x1) * np.sin(a * x2), a * np.cos(a * x2)])
    return w[0] * d1U + w[1] * d2U


def momentum_exact(grid: Grid, t: float):
    return np.cos(MOM_FREQ * t) * momentum_profile(grid)


def momentum_source(grid: Grid, t: float, params: FluidParams):
    rho = momentum_density(grid)
    U = momentum_profile(grid)
    phi, dphi = np.cos(MOM_FREQ * t), -MOM_FREQ * np.sin(MOM_FREQ * t)
    return rho * dphi * U + phi * (rho * momentum_advection_exact(grid)
                                   + momentum_lame_exact(grid, params))


def momentum_solution(n: int, dt: float, t_end: float, params: FluidParams | None = None):
    params = params or FluidParams()
    g = Grid(n)
    rho, w = momentum_density(g), momentum_advector(g)
    u = momentum_exact(g, 0.0)
    steps = int(round(t_end / dt))
    for i in range(1, steps + 1):
        u = solve_linear_momentum(g, rho, w, momentum_source(g, i * dt, params), u, dt,
                                  params).v
    return g, u, steps * dt


def momentum_error(n: int, dt: float, t_end: float, params: FluidParams | None = None) -> float:
    g, u, t = momentum_solution(n, dt, t_end, params)
    return float(np.max(np.abs(u - momentum_exact(g, t))))


def momentum_study(n: int = 16, t_end: float = 0.5, dts=(0.05, 0.025, 0.0125)) -> Study:
    return Study("momentum", tuple(dts), tuple(momentum_error(n, dt, t_end) for dt in dts))


# -- wave ------------------------------------------------------------------------

def nls_study(n: int = 32, t_end: float = 0.1, counts=(10, 20, 40), seed: int = 0) -> Study:
    """Strang error against the space-discrete reference with the flow frozen."""
    g = Grid(n)
    st = smooth_random(g, seed=seed)
    spec = CouplingSpec()
    vol = 1.0 / st.rho0

    def pot(p):
        return potential(p, vol, spec)

    ref = nls_reference(st.psi, pot, t_end)
    errors = []
    for m in counts:
        dt = t_end / m
        psi = st.psi
        for _ in range(m):
            psi = nls_step(g, psi, pot, dt)
        errors.append(float(np.max(np.abs(psi - ref))))
    return Study("nls", tuple(t_end / m for m in counts), tuple(errors))


# -- coupled step ----------------------------------------------------------------

def coupled_study(n: int = 32, t_end: float = 0.02, dts=(4e-3, 2e-3, 1e-3, 5e-4),
                  seed: int = 0, params: ModelParams | None = None) -> Study:
    """Three-level self-convergence of the full step: ``e(dt) = |X_dt - X_{dt/2}|``."""
    params = params or ModelParams()
    g = Grid(n)
    init = smooth_random(g, seed=seed)
    finals = []
    for dt in dts:
        s = run(init, t_end, StepConfig(dt=dt, diagnostic_interval=10**9), params,
                keep_reports=False).final
        finals.append(s)

    def gap(a, b):
        return (g.l2(a.rho - b.rho) + g.l2(a.u - b.u) + g.l2(a.H - b.H)
                + g.l2(a.psi - b.psi))

    errors = tuple(gap(finals[i], finals[i + 1]) for i in range(len(dts) - 1))
    return Study("coupled", tuple(dts[:-1]), errors)


# -- spatial floor -----------------------------------------------------------------

def spatial_floor(n: int = 64, params: FluidParams | None = None) -> dict:
    """Errors of spectral operators on band-limited fields against closed forms,
    and resolution independence of the momentum manufactured solution."""
    params = params or FluidParams()
    g = Grid(n)
    x1, x2 = g.x
    a = TWO_PI
    f = np.sin(a * x1) * np.cos(2 * a * x2)
    grad_exact = np.stack([a * np.cos(a * x1) * np.cos(2 * a * x2),
                           -2 * a * np.sin(a * x1) * np.sin(2 * a * x2)])
    U = momentum_profile(g)
    div_exact = a * np.cos(a * x2) * (np.cos(a * x1) + 1.0)
    curl_exact = -a * np.sin(a * x1) * np.sin(a * x2)
    out = {
        "gradient": float(np.max(np.abs(g.grad(f) - grad_exact))),
        "laplacian": float(np.max(np.abs(g.laplacian(f) + 5 * a * a * f))),
        "divergence": float(np.max(np.abs(g.div(U) - div_exact))),
        "curl": float(np.max(np.abs(g.curl_z(U) - curl_exact))),
        "lame": float(np.max(np.abs(lame_apply(g, U, momentum_density(g), params)
                                    - momentum_lame_exact(g, params)))),
    }
    _, u_lo, _ = momentum_solution(n // 2, 0.05, 0.25, params)
    _, u_hi, _ = momentum_solution(n, 0.05, 0.25, params)
    out["momentum_resolution_gap"] = float(np.max(np.abs(u_hi[:, ::2, ::2] - u_lo)))
    return out


STUDIES = {
    "continuity": continuity_study,
    "momentum": momentum_study,
    "nls": nls_study,
    "coupled": coupled_study,
}
