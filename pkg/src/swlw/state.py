"""Full-system snapshot and the parameter bundle shared by the solvers."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .coupling import CouplingSpec
from .errors import InvariantViolated
from .fluid import FluidParams
from .grid import Grid
from .lagrangian import FlowMapState, compose_to_euler, compose_to_lagr
from .magnetics import MagneticParams, max_divergence

DIV_H_TOL = 1e-10


@dataclass(frozen=True)
class ModelParams:
    fluid: FluidParams = field(default_factory=FluidParams)
    magnetic: MagneticParams = field(default_factory=MagneticParams)
    coupling: CouplingSpec = field(default_factory=CouplingSpec)


@dataclass(frozen=True)
class SimState:
    """``(rho, u, H)`` live on the Eulerian grid, ``psi`` on the Lagrangian one.

    ``rho0`` is the initial density; with the identity as initial map it gives
    ``J / rho = 1 / rho0(y(t, x))`` at all later times.
    """

    grid: Grid
    rho: np.ndarray
    u: np.ndarray
    H: np.ndarray
    psi: np.ndarray
    flow: FlowMapState
    rho0: np.ndarray
    t: float = 0.0

    @classmethod
    def initial(cls, grid: Grid, rho, u, H, psi) -> "SimState":
        rho = np.array(rho, dtype=float)
        return cls(grid=grid, rho=rho, u=np.array(u, dtype=float), H=np.array(H, dtype=float),
                   psi=np.array(psi, dtype=complex), flow=FlowMapState.identity(grid),
                   rho0=rho.copy(), t=0.0)

    def replace(self, **changes) -> "SimState":
        return replace(self, **changes)

    def specific_volume(self) -> np.ndarray:
        """``v(t, y) = 1 / rho(t, x(t, y))`` on the Lagrangian grid."""
        return 1.0 / compose_to_lagr(self.grid, self.rho, self.flow)

    def psi_on_euler(self) -> np.ndarray:
        return compose_to_euler(self.grid, self.psi, self.flow)

    def j_over_rho(self) -> np.ndarray:
        """``J / rho`` through the initial density carried by the map."""
        return 1.0 / compose_to_euler(self.grid, self.rho0, self.flow)

    def validate(self) -> "SimState":
        g = self.grid
        for name in ("rho", "u", "H", "psi"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                raise InvariantViolated(f"{name} has non-finite entries at t={self.t:.6g}")
        if self.rho.shape != g.shape or self.u.shape != (2,) + g.shape:
            raise ValueError("state fields do not match the grid")
        if self.rho.min() <= 0:
            raise InvariantViolated(f"density reached {self.rho.min():.3e} at t={self.t:.6g}")
        dH = max_divergence(g, self.H)
        if dH > DIV_H_TOL:
            raise InvariantViolated(f"div H = {dH:.3e} exceeds {DIV_H_TOL:g}")
        J = self.flow.J
        if J.min() <= 0:
            raise InvariantViolated(f"Jacobian reached {J.min():.3e} at t={self.t:.6g}")
        return self
