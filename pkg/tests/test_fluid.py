import warnings

import numpy as np
import pytest

from swlw.errors import CFLViolation
from swlw.fluid import (
    FluidParams,
    continuity_step_characteristics,
    continuity_step_spectral,
    density_bounds,
    internal_energy,
    lambda_visc,
    pressure,
)
from swlw.grid import Grid

TWO_PI = 2 * np.pi
P = FluidParams()


def test_constitutive_laws():
    rho = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(pressure(rho, P), rho**1.4)
    np.testing.assert_allclose(lambda_visc(rho, P), 0.05 * rho**2)
    np.testing.assert_allclose(internal_energy(rho, P), rho**0.4 / 0.4)


def test_internal_energy_is_pressure_work():
    # de/drho = p / rho^2
    rho = np.linspace(0.5, 2.0, 7)
    eps = 1e-6
    de = (internal_energy(rho + eps, P) - internal_energy(rho - eps, P)) / (2 * eps)
    np.testing.assert_allclose(de, pressure(rho, P) / rho**2, rtol=1e-8)


def test_nonpositive_density_rejected():
    with pytest.raises(ValueError):
        pressure(np.array([1.0, 0.0]), P)


def test_parameter_validation_collects_all_problems():
    with pytest.raises(ValueError) as exc:
        FluidParams(a=0, mu=-1)
    assert "a must be > 0" in str(exc.value) and "mu must be > 0" in str(exc.value)


def test_small_beta_warns():
    with pytest.warns(UserWarning, match="no-vacuum guarantee void"):
        FluidParams(beta=1.2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        FluidParams(beta=1.5)


def test_density_bounds():
    assert density_bounds(np.array([[0.3, 2.0]])) == (0.3, 2.0)


def _translation_case(n):
    g = Grid(n)
    x1, x2 = g.x
    rho = 1 + 0.2 * np.sin(TWO_PI * (x1 + 2 * x2))
    c = np.array([0.3, -0.2])
    u = np.broadcast_to(c[:, None, None], (2,) + g.shape).copy()
    return g, rho, u, c


def test_spectral_step_conserves_mass_to_roundoff(grid32):
    rng = np.random.default_rng(0)
    rho = 1 + 0.1 * grid32.dealias(rng.standard_normal(grid32.shape))
    u = 0.1 * grid32.dealias(rng.standard_normal((2,) + grid32.shape))
    out = continuity_step_spectral(grid32, rho, u, 1e-3)
    assert abs(out.mean() - rho.mean()) < 1e-15


def test_spectral_step_translates_with_third_order_error():
    g, rho, u, c = _translation_case(32)
    errs = []
    for dt in (4e-3, 2e-3):
        r = rho
        steps = int(round(0.04 / dt))
        for _ in range(steps):
            r = continuity_step_spectral(g, r, u, dt)
        x1, x2 = g.x
        exact = 1 + 0.2 * np.sin(TWO_PI * ((x1 - c[0] * 0.04) + 2 * (x2 - c[1] * 0.04)))
        errs.append(np.abs(r - exact).max())
    assert errs[0] < 1e-5
    assert errs[0] / errs[1] > 7.0


def test_characteristic_step_is_exact_for_whole_cell_shift():
    g, rho, _, _ = _translation_case(16)
    dt = 0.01
    u = np.zeros((2,) + g.shape)
    u[0] = g.h / dt  # one cell per step
    out = continuity_step_characteristics(g, rho, u, dt, cfl_max=None)
    np.testing.assert_allclose(out, np.roll(rho, 1, axis=0), atol=1e-12)


def test_characteristic_step_keeps_density_positive(grid16):
    rho = np.full(grid16.shape, 1e-3)
    rho[4, 4] = 5.0
    u = 0.2 * np.stack([np.sin(TWO_PI * grid16.x[1]), np.cos(TWO_PI * grid16.x[0])])
    out = continuity_step_characteristics(grid16, rho, u, 0.01)
    assert out.min() > 0


def test_rest_is_a_fixed_point(grid16):
    rho = 1 + 0.1 * np.sin(TWO_PI * grid16.x[0])
    z = np.zeros((2,) + grid16.shape)
    np.testing.assert_array_equal(continuity_step_spectral(grid16, rho, z, 0.1), rho)
    np.testing.assert_array_equal(continuity_step_characteristics(grid16, rho, z, 0.1), rho)


def test_cfl_violation_raises(grid16):
    u = np.ones((2,) + grid16.shape)
    with pytest.raises(CFLViolation, match="reduce dt"):
        continuity_step_spectral(grid16, np.ones(grid16.shape), u, 0.1)
