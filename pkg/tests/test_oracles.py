import numpy as np
import pytest

from swlw.coupling import CouplingSpec
from swlw.fluid import FluidParams
from swlw.scenarios import plane_wave
from swlw.grid import Grid
from swlw.verification.oracles import ReferenceNavierStokes, nls_reference, split_step_nls

TWO_PI = 2 * np.pi


def test_reference_ns_keeps_rest_at_rest():
    p = FluidParams()
    ref = ReferenceNavierStokes(16, p.a, p.gamma, p.mu, p.b, p.beta)
    rho = np.ones((16, 16))
    u = np.zeros((2, 16, 16))
    r, v = ref.step(rho, u, 1e-3)
    np.testing.assert_array_equal(r, rho)
    assert np.abs(v).max() < 1e-12


def test_reference_ns_conserves_mass():
    p = FluidParams()
    ref = ReferenceNavierStokes(16, p.a, p.gamma, p.mu, p.b, p.beta)
    x = np.arange(16) / 16
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    rho = 1 + 0.1 * np.sin(TWO_PI * x1)
    u = 0.1 * np.stack([np.cos(TWO_PI * x2), np.sin(TWO_PI * x1)])
    r, v = ref.run(rho, u, 1e-3, 3)
    assert abs(r.mean() - rho.mean()) < 1e-14


def test_reference_ns_step_solves_its_residual():
    p = FluidParams()
    ref = ReferenceNavierStokes(16, p.a, p.gamma, p.mu, p.b, p.beta)
    x = np.arange(16) / 16
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    rho = 1 + 0.1 * np.sin(TWO_PI * x1)
    u = 0.1 * np.stack([np.cos(TWO_PI * x2), np.sin(TWO_PI * x1)])
    r, v = ref.step(rho, u, 1e-3)
    assert np.abs(ref.residual(v, rho, u, 1e-3)).max() < 1e-10
    np.testing.assert_allclose(r, ref.density(rho, u, v, 1e-3))


def test_split_step_plane_wave_phase():
    g = Grid(16)
    spec = CouplingSpec()
    psi0 = plane_wave(g, 1.0, (1, 0))
    vol = np.full(g.shape, 1.0)
    psi = split_step_nls(psi0, vol, 1e-3, 20, spec.alpha, spec.g_eval, spec.h_prime)
    omega = TWO_PI**2 + 1 + float(spec.g_eval(1.0) * spec.h_prime(1.0))
    np.testing.assert_allclose(psi, psi0 * np.exp(-1j * omega * 0.02), atol=1e-12)


def test_dop853_reference_on_plane_wave():
    g = Grid(8)
    psi0 = plane_wave(g, 0.5, (0, 1))
    out = nls_reference(psi0, lambda p: np.abs(p) ** 2, 0.05)
    omega = TWO_PI**2 + 0.25
    np.testing.assert_allclose(out, psi0 * np.exp(-1j * omega * 0.05), atol=1e-10)
