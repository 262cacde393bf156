"""Named initial conditions."""
from __future__ import annotations

import numpy as np

from .grid import Grid
from .magnetics import project_divfree
from .state import SimState


def plane_wave(grid: Grid, amplitude: float = 1.0, k=(1, 0)):
    phase = 2.0 * np.pi * (k[0] * grid.x[0] + k[1] * grid.x[1])
    return amplitude * np.exp(1j * phase)


def equilibrium(grid: Grid, amplitude: float = 1.0, k=(1, 0), rho: float = 1.0) -> SimState:
    """Constant density, fluid at rest, no field, plane-wave ``psi``: an exact solution."""
    zero = np.zeros((2,) + grid.shape)
    return SimState.initial(grid, np.full(grid.shape, float(rho)), zero, zero.copy(),
                            plane_wave(grid, amplitude, k))


def _band_limited(grid: Grid, rng: np.random.Generator, kmax: int, count: int = 1,
                  complex_field: bool = False):
    """Random fields with modes ``|k_i| <= kmax`` and a mild spectral decay."""
    n = grid.n
    out = []
    for _ in range(count):
        spec = np.zeros(grid.shape, dtype=complex)
        for k1 in range(-kmax, kmax + 1):
            for k2 in range(-kmax, kmax + 1):
                if k1 == 0 and k2 == 0 and not complex_field:
                    continue
                w = 1.0 / (1.0 + k1 * k1 + k2 * k2)
                spec[k1 % n, k2 % n] = w * (rng.standard_normal() + 1j * rng.standard_normal())
        f = np.fft.ifft2(spec) * n * n
        out.append(f if complex_field else f.real)
    return np.array(out)


def smooth_random(grid: Grid, seed: int = 0, kmax: int = 3, rho_range=(0.8, 1.2),
                  u_amp: float = 0.1, H_amp: float = 0.1, psi_amp: float = 1.0,
                  psi_kmax: int = 2) -> SimState:
    """Seeded band-limited data: ``rho0`` spans ``rho_range`` exactly, ``max|u| = u_amp``,
    ``max|H| = H_amp`` (divergence free), ``psi`` has RMS ``psi_amp``."""
    rng = np.random.default_rng(seed)
    lo, hi = rho_range
    f = _band_limited(grid, rng, kmax)[0]
    f = (f - f.min()) / (f.max() - f.min())
    rho = lo + (hi - lo) * f
    u = _band_limited(grid, rng, kmax, 2)
    u *= u_amp / np.max(np.hypot(*u))
    H = project_divfree(grid, _band_limited(grid, rng, kmax, 2))
    H *= H_amp / np.max(np.hypot(*H))
    psi = _band_limited(grid, rng, psi_kmax, complex_field=True)[0]
    psi *= psi_amp / np.sqrt(np.mean(np.abs(psi) ** 2))
    return SimState.initial(grid, rho, u, H, psi)


def shear(grid: Grid, U: float = 1.0, density_amp: float = 0.2, amplitude: float = 1.0,
          k=(1, 0)) -> SimState:
    """``u = (0, U sin 2 pi x1)`` over a nonuniform density, plane-wave ``psi``, ``H = 0``."""
    x1, x2 = grid.x
    rho = 1.0 + density_amp * np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * x2)
    u = np.stack([np.zeros(grid.shape), U * np.sin(2 * np.pi * x1)])
    return SimState.initial(grid, rho, u, np.zeros((2,) + grid.shape), plane_wave(grid, amplitude, k))


def perturbation(grid: Grid, seed: int = 1, kmax: int = 3) -> dict:
    """Unit-size smooth perturbation directions for every field."""
    rng = np.random.default_rng(seed)
    dr = _band_limited(grid, rng, kmax)[0]
    du = _band_limited(grid, rng, kmax, 2)
    dH = project_divfree(grid, _band_limited(grid, rng, kmax, 2))
    dpsi = _band_limited(grid, rng, kmax, complex_field=True)[0]
    return {
        "rho": dr / np.max(np.abs(dr)),
        "u": du / np.max(np.hypot(*du)),
        "H": dH / np.max(np.hypot(*dH)),
        "psi": dpsi / np.max(np.abs(dpsi)),
    }


def perturbed_pair(grid: Grid, delta: float = 1e-3, seed: int = 0,
                   perturbation_seed: int = 1) -> tuple[SimState, SimState]:
    """``smooth-random`` data and a copy displaced by ``delta`` along :func:`perturbation`."""
    base = smooth_random(grid, seed=seed)
    d = perturbation(grid, perturbation_seed)
    other = SimState.initial(grid, base.rho + delta * d["rho"], base.u + delta * d["u"],
                             base.H + delta * d["H"], base.psi + delta * d["psi"])
    return base, other


SCENARIOS = {
    "equilibrium": equilibrium,
    "smooth-random": smooth_random,
    "shear": shear,
}


def build(name: str, grid: Grid, **kwargs) -> SimState:
    if name == "perturbed-pair":
        return perturbed_pair(grid, **kwargs)[0]
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; available: {sorted(list(SCENARIOS) + ['perturbed-pair'])}"
        ) from None
    return factory(grid, **kwargs)
