"""Energy bookkeeping, identity checks and bound monitors.

The conserved total used here is

    E = int (rho |u|^2 / 2 + rho e(rho) + |H|^2 / 2) dx
      + int (|grad psi|^2 + |psi|^4 / 2 + alpha g(v) h(|psi|^2)) dy,

with ``dE/dt = -D``. The wave part carries weights 1 and 1/2: with these the
work done by the interaction force on the fluid cancels the rate of change of
the coupling potential exactly. :func:`swlw.schrodinger.nls_energy` keeps the
half-weighted form for reporting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fluid import internal_energy, lambda_visc
from .lagrangian import compose_to_euler, opnorm2
from .magnetics import max_divergence
from .momentum import FluxFields
from .schrodinger import coupling_energy, gradient_energy, mass, quartic_energy
from .state import ModelParams, SimState

COMPONENTS = ("kinetic", "internal", "magnetic", "psi_gradient", "psi_quartic", "coupling")


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    internal: float
    magnetic: float
    psi_gradient: float
    psi_quartic: float
    coupling: float

    @property
    def total(self) -> float:
        return float(sum(getattr(self, c) for c in COMPONENTS))

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in COMPONENTS}


def total_energy(state: SimState, params: ModelParams) -> EnergyBreakdown:
    g, rho = state.grid, state.rho
    psi = state.psi
    return EnergyBreakdown(
        kinetic=float(g.integrate(0.5 * rho * np.sum(state.u**2, axis=0))),
        internal=float(g.integrate(rho * internal_energy(rho, params.fluid))),
        magnetic=float(g.integrate(0.5 * np.sum(state.H**2, axis=0))),
        psi_gradient=gradient_energy(g, psi),
        psi_quartic=0.5 * quartic_energy(psi),
        coupling=coupling_energy(psi, state.specific_volume(), params.coupling),
    )


def dissipation(state: SimState, params: ModelParams) -> float:
    """``int (mu |grad u|^2 + (lambda + mu) (div u)^2 + nu |grad H|^2) dx``."""
    g, fp = state.grid, params.fluid
    Gu = g.jacobian_matrix(state.u)
    GH = g.jacobian_matrix(state.H)
    div_u = Gu[0, 0] + Gu[1, 1]
    dens = (fp.mu * np.sum(Gu**2, axis=(0, 1))
            + (lambda_visc(state.rho, fp) + fp.mu) * div_u**2
            + params.magnetic.nu * np.sum(GH**2, axis=(0, 1)))
    return float(g.integrate(dens))


def grad_u_sup(state: SimState) -> float:
    return float(opnorm2(state.grid.jacobian_matrix(state.u)).max())


# -- bounds ------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    rho_min: float
    rho_max: float
    J_over_rho_min: float
    J_over_rho_max: float
    divH_inf: float
    psi_max: float
    E_inf: float

    def jrho_within(self, rho0, slack: float = 1e-4) -> bool:
        """``(max rho0)^-1 <= J/rho <= (min rho0)^-1`` up to a relative slack."""
        lo, hi = 1.0 / float(np.max(rho0)), 1.0 / float(np.min(rho0))
        return self.J_over_rho_min >= lo * (1 - slack) and self.J_over_rho_max <= hi * (1 + slack)


def bounds_report(state: SimState) -> BoundsReport:
    jr = state.flow.J / state.rho
    return BoundsReport(
        rho_min=float(state.rho.min()),
        rho_max=float(state.rho.max()),
        J_over_rho_min=float(jr.min()),
        J_over_rho_max=float(jr.max()),
        divH_inf=max_divergence(state.grid, state.H),
        psi_max=float(np.abs(state.psi).max()),
        E_inf=float(opnorm2(state.flow.E).max()),
    )


def jrho_check(state: SimState) -> float:
    """Max relative gap between ``det E / rho`` and ``1 / rho0(y(t, x))``."""
    rho0_y = compose_to_euler(state.grid, state.rho0, state.flow)
    return float(np.max(np.abs(state.flow.J / state.rho * rho0_y - 1.0)))


def flux_stats(flux: FluxFields) -> dict:
    out = {}
    for name in ("F", "omega", "Lambda"):
        f = getattr(flux, name)
        out[name] = {
            "mean": float(np.mean(f)),
            "min": float(f.min()),
            "max": float(f.max()),
            "l2": float(np.sqrt(np.mean(f**2))),
        }
    return out


# -- running ledger ----------------------------------------------------------

class EnergyTracker:
    """Accumulates ``int D dt`` (trapezoidal, every step) and ``int |grad u|_inf dt``."""

    def __init__(self, state: SimState, params: ModelParams):
        self.params = params
        self.D_cum = 0.0
        self.grad_u_int = 0.0
        self._observe(state)
        self.E0 = self.energy.total

    def _observe(self, state: SimState):
        self.state = state
        self.energy = total_energy(state, self.params)
        self.D = dissipation(state, self.params)
        self.grad_u = grad_u_sup(state)

    def update(self, state: SimState, dt: float):
        D_prev, gu_prev = self.D, self.grad_u
        self._observe(state)
        self.D_cum += 0.5 * dt * (D_prev + self.D)
        self.grad_u_int += 0.5 * dt * (gu_prev + self.grad_u)

    @property
    def row(self) -> dict:
        s = self.state
        b = bounds_report(s)
        E = self.energy.total
        out = {"t": s.t, "energy": E}
        out.update(self.energy.as_dict())
        out.update({
            "dissipation": self.D,
            "dissipation_cum": self.D_cum,
            "residual": E + self.D_cum - self.E0,
            "rel_residual": (E + self.D_cum - self.E0) / self.E0 if self.E0 else 0.0,
            "mass_rho": float(s.grid.integrate(s.rho)),
            "mass_psi": mass(s.psi),
            "rho_min": b.rho_min,
            "rho_max": b.rho_max,
            "jrho_min": b.J_over_rho_min,
            "jrho_max": b.J_over_rho_max,
            "divH_inf": b.divH_inf,
            "psi_max": b.psi_max,
            "E_inf": b.E_inf,
            "E_bound": float(np.exp(self.grad_u_int)),
            "u_max": float(np.max(np.hypot(*s.u))),
        })
        return out


LEDGER_COLUMNS = (
    "t", "energy", *COMPONENTS, "dissipation", "dissipation_cum", "residual",
    "rel_residual", "mass_rho", "mass_psi", "rho_min", "rho_max", "jrho_min", "jrho_max",
    "divH_inf", "psi_max", "E_inf", "E_bound", "u_max",
)


def energy_identity_check(rows: list[dict]) -> np.ndarray:
    """``|E(t) + int_0^t D - E(0)| / E(0)`` for each ledger row."""
    if not rows:
        return np.zeros(0)
    E0 = rows[0]["energy"]
    return np.array([abs(r["energy"] + r["dissipation_cum"] - E0) / abs(E0) for r in rows])


def refinement_ratio(coarse: float, fine: float) -> float:
    """Error reduction factor between a run and its ``dt/2`` twin."""
    return float(coarse / fine) if fine != 0 else float("inf")


# -- continuous dependence ---------------------------------------------------

def relative_energy(a: SimState, b: SimState) -> dict:
    """Pointwise-in-time quadratic distance between two solutions, term by term."""
    if a.grid != b.grid:
        raise ValueError("states live on different grids")
    g = a.grid
    terms = {
        "density": float(g.integrate((a.rho - b.rho) ** 2)),
        "velocity": float(g.integrate(a.rho * np.sum((a.u - b.u) ** 2, axis=0))),
        "magnetic": float(g.integrate(np.sum((a.H - b.H) ** 2, axis=0))),
        "wave": float(g.integrate(np.abs(a.psi - b.psi) ** 2)),
    }
    terms["instant"] = sum(terms.values())
    return terms


def gradient_gaps(a: SimState, b: SimState) -> tuple[float, float]:
    g = a.grid
    du = g.jacobian_matrix(a.u - b.u)
    dH = g.jacobian_matrix(a.H - b.H)
    return float(g.integrate(np.sum(du**2, axis=(0, 1)))), float(g.integrate(np.sum(dH**2, axis=(0, 1))))


class RelativeEnergyTracker:
    """Adds the time-integrated gradient gaps of ``u`` and ``H`` to :func:`relative_energy`."""

    def __init__(self, a: SimState, b: SimState):
        self.u_cum = 0.0
        self.H_cum = 0.0
        self._last = gradient_gaps(a, b)
        self.a, self.b = a, b

    def update(self, a: SimState, b: SimState, dt: float):
        cur = gradient_gaps(a, b)
        self.u_cum += 0.5 * dt * (self._last[0] + cur[0])
        self.H_cum += 0.5 * dt * (self._last[1] + cur[1])
        self._last = cur
        self.a, self.b = a, b

    def report(self) -> dict:
        out = relative_energy(self.a, self.b)
        out["grad_u_cum"] = self.u_cum
        out["grad_H_cum"] = self.H_cum
        out["composite"] = out["instant"] + self.u_cum + self.H_cum
        return out
