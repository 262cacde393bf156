"""Coupled time stepping by fixed-point iteration of the map ``K``.

``K`` takes a trial velocity on ``[t_n, t_n + dt]``, advances density, flow
map, wave and magnetic field with it, and returns the velocity obtained from
the linear momentum problem those fields define. A step accepts the fixed
point of ``K`` reached by Picard iteration started from ``u_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import InvariantViolated, PicardDiverged, SimulationError
from .fluid import continuity_step_spectral
from .grid import Grid
from .lagrangian import (
    FlowMapState,
    advance_E,
    advance_particle_tensors,
    advance_particles,
    advance_y,
    jacobian,
)
from .magnetics import induction_step
from .momentum import MomentumRhs, assemble_rhs, solve_linear_momentum
from .schrodinger import nls_step, potential
from .state import ModelParams, SimState
from .velocity import VelocityPath, check_cfl


@dataclass(frozen=True)
class StepConfig:
    dt: float = 1e-3
    picard_tol: float = 1e-8
    picard_atol: float = 1e-14
    max_picard: int = 25
    cfl_max: float = 0.5
    diagnostic_interval: int = 1
    inner_tol: float = 1e-12
    max_inner: int = 200
    freeze_velocity: bool = False

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        if not (self.dt > 0 and math.isfinite(self.dt)):
            out.append("dt must be > 0")
        if not self.picard_tol > 0:
            out.append("picard_tol must be > 0")
        if self.picard_atol < 0:
            out.append("picard_atol must be >= 0")
        if self.max_picard < 1:
            out.append("max_picard must be >= 1")
        if not self.cfl_max > 0:
            out.append("cfl_max must be > 0")
        if self.diagnostic_interval < 1:
            out.append("diagnostic_interval must be >= 1")
        if not self.inner_tol > 0:
            out.append("inner_tol must be > 0")
        return out


@dataclass(frozen=True)
class PicardReport:
    iterations: int
    update_norms: tuple[float, ...]
    contraction_ratios: tuple[float, ...]
    inner_iterations: tuple[int, ...] = ()

    @property
    def max_ratio(self) -> float:
        return max(self.contraction_ratios, default=0.0)


@dataclass(frozen=True)
class SubStates:
    """Fields produced by one application of ``K``."""

    rho: np.ndarray
    disp: np.ndarray
    x: np.ndarray
    psi: np.ndarray
    H: np.ndarray
    rhs: MomentumRhs | None
    inner_iterations: int = 0


def picard_norm(grid: Grid, w, dt: float) -> float:
    """Per-step stand-in for the ``C(L2) cap L2(H1)`` norm: ``|w| + sqrt(dt) |grad w|``."""
    gw = grid.jacobian_matrix(w)
    return grid.l2(w) + math.sqrt(dt) * grid.l2(gw)


def k_apply(state: SimState, u_guess, dt: float, params: ModelParams,
            config: StepConfig) -> tuple[np.ndarray, SubStates]:
    """One application of ``K``: density, map, wave, field, then momentum."""
    g = state.grid
    path = VelocityPath.of(g, state.u, u_guess)
    check_cfl(path, dt, config.cfl_max)

    rho = continuity_step_spectral(g, state.rho, path, dt, cfl_max=None)
    if rho.min() <= 0:
        raise InvariantViolated(f"density reached {rho.min():.3e}; reduce dt")
    disp = advance_y(g, state.flow.disp, path, dt, cfl_max=None)
    x = advance_particles(g, state.flow.x, path, dt)

    # wave: specific volume at the step midpoint along particle paths
    v_start = 1.0 / g.interp(state.rho, state.flow.x)
    v_end = 1.0 / g.interp(rho, x)
    v_mid = 0.5 * (v_start + v_end)
    spec = params.coupling
    psi = nls_step(g, state.psi, lambda p: potential(p, v_mid, spec), dt)

    H = induction_step(g, state.H, path, dt, params.magnetic, cfl_max=None)

    if config.freeze_velocity:
        return np.zeros_like(state.u), SubStates(rho, disp, x, psi, H, None)

    y_pts = g.x + disp
    psi_e = g.interp(psi, y_pts)
    j_over_rho = 1.0 / g.interp(state.rho0, y_pts)
    rhs = assemble_rhs(g, rho, H, psi_e, j_over_rho, params.fluid, spec)
    sol = solve_linear_momentum(g, rho, path.u_end, rhs.total, state.u, dt, params.fluid,
                                tol=config.inner_tol, max_inner=config.max_inner,
                                v0=path.u_end)
    return sol.v, SubStates(rho, disp, x, psi, H, rhs, sol.iterations)


def _complete_map(state: SimState, sub: SubStates, path: VelocityPath, dt: float) -> FlowMapState:
    """Deformation tensors for the accepted step. They do not feed back into
    the dynamics, so they are advanced once with the final trial velocity."""
    g = state.grid
    fm = state.flow
    E = advance_E(g, fm.E, path, dt, cfl_max=None)
    _, B, log_j = advance_particle_tensors(g, fm.x, fm.B, fm.log_j, path, dt)
    new = FlowMapState(disp=sub.disp, x=sub.x, E=E, B=B, log_j=log_j, t=fm.t + dt)
    jacobian(new)
    return new


def advance(state: SimState, config: StepConfig, params: ModelParams,
            dt: float | None = None) -> tuple[SimState, PicardReport]:
    """Advance one step: ``u^(k+1) = K(u^(k))`` from ``u^(0) = u_n`` until the
    relative update in :func:`picard_norm` drops below ``picard_tol``."""
    dt = config.dt if dt is None else dt
    g = state.grid
    guess = state.u
    norms: list[float] = []
    ratios: list[float] = []
    inner: list[int] = []
    streak = 0

    if config.freeze_velocity:
        guess = np.zeros_like(state.u)
        state = state.replace(u=guess)
        _, sub = k_apply(state, guess, dt, params, config)
        v, iterations = guess, 1
    else:
        iterations = 0
        while True:
            if iterations >= config.max_picard:
                raise PicardDiverged(
                    f"Picard iteration did not converge in {config.max_picard} iterations "
                    f"at t={state.t:.6g} (last update {norms[-1]:.3e}); reduce dt"
                )
            v, sub = k_apply(state, guess, dt, params, config)
            iterations += 1
            inner.append(sub.inner_iterations)
            upd = picard_norm(g, v - guess, dt)
            norms.append(upd)
            if len(norms) > 1:
                prev = norms[-2]
                ratios.append(upd / prev if prev > 0 else 0.0)
                streak = streak + 1 if ratios[-1] >= 1.0 else 0
                if streak >= 3:
                    raise PicardDiverged(
                        f"Picard ratios >= 1 for 3 consecutive iterations at t={state.t:.6g}; "
                        "reduce dt"
                    )
            scale = picard_norm(g, v, dt)
            if upd <= config.picard_tol * scale + config.picard_atol:
                break
            guess = v

    path = VelocityPath.of(g, state.u, guess)
    flow = _complete_map(state, sub, path, dt)
    new = SimState(grid=g, rho=sub.rho, u=v, H=sub.H, psi=sub.psi, flow=flow,
                   rho0=state.rho0, t=state.t + dt)
    new.validate()
    report = PicardReport(iterations, tuple(norms), tuple(ratios), tuple(inner))
    return new, report


def fixed_point_defect(state_n: SimState, state_np1: SimState, config: StepConfig,
                       params: ModelParams, dt: float | None = None) -> float:
    """``|K(u_{n+1}) - u_{n+1}|_2 / |u_{n+1}|_2`` for an accepted step."""
    dt = config.dt if dt is None else dt
    g = state_n.grid
    v, _ = k_apply(state_n, state_np1.u, dt, params, config)
    den = g.l2(state_np1.u)
    return g.l2(v - state_np1.u) / den if den > 0 else g.l2(v)


Sink = Callable[["StepRecord"], None]


@dataclass(frozen=True)
class StepRecord:
    step: int
    state: SimState
    report: PicardReport | None
    ledger: dict | None = None


@dataclass
class RunSummary:
    final: SimState
    steps: int
    reports: list[PicardReport] = field(default_factory=list)
    ledger: list[dict] = field(default_factory=list)

    @property
    def max_picard_iterations(self) -> int:
        return max((r.iterations for r in self.reports), default=0)


def step_count(t_end: float, dt: float) -> int:
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    return int(math.ceil(t_end / dt - 1e-9))


def run(initial: SimState, t_end: float, config: StepConfig, params: ModelParams,
        sinks: Iterable[Sink] = (), keep_reports: bool = True) -> RunSummary:
    """Step from ``initial.t`` to ``t_end``; the last step is shortened if
    ``t_end`` is not a multiple of ``dt``.

    Every sink receives a :class:`StepRecord` at the diagnostic cadence and at
    the final step. Execution is single-threaded apart from FFT workers and
    fully deterministic.
    """
    from .diagnostics import EnergyTracker

    sinks = list(sinks)
    initial.validate()
    state = initial
    tracker = EnergyTracker(state, params)
    summary = RunSummary(final=state, steps=0)
    summary.ledger.append(tracker.row)
    for s in sinks:
        s(StepRecord(0, state, None, tracker.row))

    n_steps = step_count(t_end - initial.t, config.dt)
    for i in range(1, n_steps + 1):
        dt = min(config.dt, t_end - state.t) if i == n_steps else config.dt
        try:
            state, report = advance(state, config, params, dt=dt)
        except SimulationError as exc:
            exc.last_state = state
            raise
        tracker.update(state, dt)
        if keep_reports:
            summary.reports.append(report)
        if i % config.diagnostic_interval == 0 or i == n_steps:
            row = tracker.row
            summary.ledger.append(row)
            for s in sinks:
                s(StepRecord(i, state, report, row))
    summary.final = state
    summary.steps = n_steps
    return summary


def run_pair(a: SimState, b: SimState, t_end: float, config: StepConfig,
             params: ModelParams) -> list[dict]:
    """Advance two solutions in lockstep and record their relative energy."""
    from .diagnostics import RelativeEnergyTracker

    tracker = RelativeEnergyTracker(a, b)
    rows = [dict(t=a.t, **tracker.report())]
    n_steps = step_count(t_end - a.t, config.dt)
    for i in range(1, n_steps + 1):
        dt = min(config.dt, t_end - a.t) if i == n_steps else config.dt
        a, _ = advance(a, config, params, dt=dt)
        b, _ = advance(b, config, params, dt=dt)
        tracker.update(a, b, dt)
        if i % config.diagnostic_interval == 0 or i == n_steps:
            rows.append(dict(t=a.t, **tracker.report()))
    return rows
