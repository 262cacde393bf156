import numpy as np
import pytest

from swlw.errors import InvariantViolated
from swlw.grid import Grid
from swlw.magnetics import max_divergence
from swlw.scenarios import build, equilibrium, perturbed_pair, shear, smooth_random


def test_smooth_random_meets_its_stated_ranges(grid32):
    st = smooth_random(grid32, seed=7)
    assert st.rho.min() == pytest.approx(0.8) and st.rho.max() == pytest.approx(1.2)
    assert np.max(np.hypot(*st.u)) == pytest.approx(0.1)
    assert np.max(np.hypot(*st.H)) == pytest.approx(0.1)
    assert np.sqrt(np.mean(np.abs(st.psi) ** 2)) == pytest.approx(1.0)
    assert max_divergence(grid32, st.H) < 1e-13
    np.testing.assert_array_equal(st.rho0, st.rho)
    st.validate()


def test_seeds_are_reproducible_and_distinct(grid16):
    a, b, c = smooth_random(grid16, 3), smooth_random(grid16, 3), smooth_random(grid16, 4)
    np.testing.assert_array_equal(a.psi, b.psi)
    assert not np.allclose(a.rho, c.rho)


def test_fields_are_band_limited(grid32):
    st = smooth_random(grid32, kmax=3)
    spec = np.abs(np.fft.fft2(st.rho))
    m = np.abs(np.fft.fftfreq(32, 1 / 32))
    outside = (m[:, None] > 3) | (m[None, :] > 3)
    assert spec[outside].max() < 1e-10


def test_equilibrium_and_shear_profiles(grid16):
    eq = equilibrium(grid16, amplitude=0.5, k=(0, 2))
    assert not np.any(eq.u) and np.all(eq.rho == 1)
    np.testing.assert_allclose(np.abs(eq.psi), 0.5)
    sh = shear(grid16, U=2.0)
    np.testing.assert_allclose(sh.u[1], 2.0 * np.sin(2 * np.pi * grid16.x[0]))
    assert sh.rho.min() >= 0.8 - 1e-12


def test_perturbed_pair_distance_scales_with_delta(grid16):
    a, b = perturbed_pair(grid16, delta=1e-3)
    a2, b2 = perturbed_pair(grid16, delta=5e-4)
    np.testing.assert_array_equal(a.rho, a2.rho)
    np.testing.assert_allclose(b.rho - a.rho, 2 * (b2.rho - a2.rho), atol=1e-16)
    assert np.abs(b.rho - a.rho).max() == pytest.approx(1e-3)
    assert max_divergence(grid16, b.H) < 1e-13


def test_build_dispatch(grid16):
    assert build("shear", grid16).u.shape == (2, 16, 16)
    np.testing.assert_array_equal(build("perturbed-pair", grid16).rho, smooth_random(grid16).rho)
    with pytest.raises(ValueError, match="unknown scenario"):
        build("vortex", grid16)


def test_state_helpers_at_identity(grid16):
    st = smooth_random(grid16)
    np.testing.assert_allclose(st.specific_volume(), 1 / st.rho, atol=1e-12)
    np.testing.assert_allclose(st.psi_on_euler(), st.psi, atol=1e-12)
    np.testing.assert_allclose(st.j_over_rho(), 1 / st.rho0, atol=1e-12)


def test_validate_catches_broken_invariants(grid16):
    st = smooth_random(grid16)
    bad_rho = st.rho.copy()
    bad_rho[0, 0] = -1.0
    with pytest.raises(InvariantViolated, match="density"):
        st.replace(rho=bad_rho).validate()
    with pytest.raises(InvariantViolated, match="div H"):
        st.replace(H=np.stack([np.sin(2 * np.pi * grid16.x[0]), np.zeros(grid16.shape)])).validate()
    nan_u = st.u.copy()
    nan_u[0, 1, 1] = np.nan
    with pytest.raises(InvariantViolated, match="non-finite"):
        st.replace(u=nan_u).validate()
    with pytest.raises(ValueError):
        st.replace(rho=np.ones((8, 8))).validate()
