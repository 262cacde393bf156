import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swlw.grid import Grid

TWO_PI = 2 * np.pi


def random_band_limited(grid, seed, kmax=4):
    rng = np.random.default_rng(seed)
    spec = np.zeros(grid.shape, dtype=complex)
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            spec[k1 % grid.n, k2 % grid.n] = rng.standard_normal() + 1j * rng.standard_normal()
    return np.fft.ifft2(spec).real * grid.n**2


@pytest.mark.parametrize("n", [7, 6, 0, -8])
def test_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        Grid(n)


def test_coordinates_and_spacing(grid16):
    assert grid16.h == 1 / 16
    assert grid16.x.shape == (2, 16, 16)
    assert grid16.x[0, 3, 5] == 3 / 16 and grid16.x[1, 3, 5] == 5 / 16


def test_field_shape_is_checked(grid16):
    with pytest.raises(ValueError):
        grid16.fft(np.zeros((8, 8)))


def test_gradient_matches_closed_form(grid32):
    x1, x2 = grid32.x
    f = np.sin(TWO_PI * x1) * np.cos(3 * TWO_PI * x2)
    exact = np.stack([TWO_PI * np.cos(TWO_PI * x1) * np.cos(3 * TWO_PI * x2),
                      -3 * TWO_PI * np.sin(TWO_PI * x1) * np.sin(3 * TWO_PI * x2)])
    np.testing.assert_allclose(grid32.grad(f), exact, atol=1e-11)


def test_laplacian_agrees_with_full_complex_transform(grid32):
    # rfft route inside Grid vs an independent full-FFT route
    f = random_band_limited(grid32, 3, kmax=10)
    m = np.fft.fftfreq(32, 1 / 32)
    k1, k2 = np.meshgrid(m, m, indexing="ij")
    ref = np.fft.ifft2(-(TWO_PI**2) * (k1**2 + k2**2) * np.fft.fft2(f)).real
    np.testing.assert_allclose(grid32.laplacian(f), ref, atol=1e-9)


def test_curl_of_gradient_and_div_of_rotated_gradient_vanish(grid32):
    f = random_band_limited(grid32, 1)
    gf = grid32.grad(f)
    assert np.abs(grid32.curl_z(gf)).max() < 1e-10
    rot = np.stack([gf[1], -gf[0]])
    assert np.abs(grid32.div(rot)).max() < 1e-10


def test_jacobian_matrix_layout(grid16):
    x1, x2 = grid16.x
    u = np.stack([np.sin(TWO_PI * x2), np.cos(TWO_PI * x1)])
    G = grid16.jacobian_matrix(u)
    np.testing.assert_allclose(G[0, 1], TWO_PI * np.cos(TWO_PI * x2), atol=1e-12)
    np.testing.assert_allclose(G[1, 0], -TWO_PI * np.sin(TWO_PI * x1), atol=1e-12)
    assert np.abs(G[0, 0]).max() < 1e-12 and np.abs(G[1, 1]).max() < 1e-12


def test_dealias_keeps_low_modes_and_removes_high(grid32):
    x1, x2 = grid32.x
    low = np.cos(TWO_PI * 5 * x1) * np.sin(TWO_PI * 10 * x2)
    high = np.cos(TWO_PI * 11 * x1)
    np.testing.assert_allclose(grid32.dealias(low + high), low, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**16))
def test_dealias_is_a_projection(seed):
    g = Grid(16)
    f = np.random.default_rng(seed).standard_normal(g.shape)
    once = g.dealias(f)
    np.testing.assert_allclose(g.dealias(once), once, atol=1e-13)
    c = f + 1j * np.random.default_rng(seed + 1).standard_normal(g.shape)
    oc = g.dealias(c)
    np.testing.assert_allclose(g.dealias(oc), oc, atol=1e-13)


def test_interp_reproduces_nodes_and_wraps(grid16):
    f = random_band_limited(grid16, 5, kmax=2)
    np.testing.assert_allclose(grid16.interp(f, grid16.x), f, atol=1e-12)
    np.testing.assert_allclose(grid16.interp(f, grid16.x + 1.0), f, atol=1e-12)
    np.testing.assert_allclose(grid16.interp(f, grid16.x - 3.0), f, atol=1e-12)


def test_interp_converges_at_fourth_order():
    errs = []
    for n in (32, 64):
        g = Grid(n)
        pts = np.mod(g.x + np.array([0.3, 0.7])[:, None, None] * g.h, 1.0)
        f = np.sin(TWO_PI * g.x[0]) * np.cos(TWO_PI * g.x[1])
        exact = np.sin(TWO_PI * pts[0]) * np.cos(TWO_PI * pts[1])
        errs.append(np.abs(g.interp(f, pts) - exact).max())
    assert errs[0] / errs[1] > 12


def test_interp_stacked_and_complex(grid16):
    f = random_band_limited(grid16, 2, kmax=2)
    stacked = np.stack([f, 2 * f])
    pts = grid16.x + 0.01
    out = grid16.interp(stacked, pts)
    assert out.shape == (2, 16, 16)
    np.testing.assert_allclose(out[1], 2 * out[0])
    z = grid16.interp(f + 1j * f, pts)
    np.testing.assert_allclose(z.imag, z.real)
    with pytest.raises(ValueError):
        grid16.interp(f, np.zeros((3, 4)))


def test_integrate_and_l2(grid16):
    assert grid16.integrate(np.full(grid16.shape, 2.5)) == pytest.approx(2.5)
    x1 = grid16.x[0]
    assert grid16.l2(np.sin(TWO_PI * x1)) == pytest.approx(np.sqrt(0.5))
