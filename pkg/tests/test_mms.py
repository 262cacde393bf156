import numpy as np
import pytest
import sympy as sp

from swlw.fluid import FluidParams
from swlw.grid import Grid
from swlw.verification import mms

X1, X2, T = sp.symbols("x1 x2 t", real=True)
A = 2 * sp.pi


def lambdify_on(grid, expr):
    f = sp.lambdify((X1, X2, T), expr, "numpy")
    return lambda t: np.broadcast_to(f(grid.x[0], grid.x[1], t), grid.shape)


def test_observed_orders():
    assert mms.observed_orders([8.0, 2.0, 0.5]) == pytest.approx([2.0, 2.0])
    s = mms.Study("x", (0.1, 0.05), (1e-2, 5e-3))
    assert s.as_dict()["order"] == pytest.approx([1.0])


def test_continuity_source_matches_symbolic_derivation():
    g = Grid(16)
    rho = 1 + sp.Rational(1, 5) * sp.cos(3 * T) * sp.sin(A * (X1 + X2))
    u = (sp.Rational(3, 10) + sp.Rational(1, 10) * sp.sin(A * X1), sp.Rational(1, 5) * sp.cos(A * X1))
    src = sp.diff(rho, T) + sp.diff(rho * u[0], X1) + sp.diff(rho * u[1], X2)
    f = lambdify_on(g, src)
    for t in (0.0, 0.37):
        np.testing.assert_allclose(mms.continuity_source(g, t), f(t), atol=1e-12)


def test_momentum_closed_forms_match_symbolic_derivation():
    g = Grid(16)
    p = FluidParams()
    mu, b, beta = sp.Rational(1, 20), sp.Rational(1, 20), 2
    rho = 1 + sp.Rational(3, 10) * sp.sin(A * X1)
    lam = b * rho**beta
    U = (sp.sin(A * X1) * sp.cos(A * X2), sp.sin(A * X2))
    w = (sp.Rational(3, 10), sp.Rational(1, 5) * sp.cos(A * X1))
    div = sp.diff(U[0], X1) + sp.diff(U[1], X2)
    coords = (X1, X2)
    lame = []
    adv = []
    for i in range(2):
        # -div(lambda div U Id + mu (grad U + grad U^T)), component i
        stress = sum(sp.diff(mu * (sp.diff(U[i], coords[j]) + sp.diff(U[j], coords[i])), coords[j])
                     for j in range(2))
        lame.append(-sp.diff(lam * div, coords[i]) - stress)
        adv.append(w[0] * sp.diff(U[i], X1) + w[1] * sp.diff(U[i], X2))
    lame_num = np.stack([lambdify_on(g, e)(0.0) for e in lame])
    adv_num = np.stack([lambdify_on(g, e)(0.0) for e in adv])
    np.testing.assert_allclose(mms.momentum_lame_exact(g, p), lame_num, atol=1e-10)
    np.testing.assert_allclose(mms.momentum_advection_exact(g), adv_num, atol=1e-12)


def test_continuity_study_is_third_order():
    s = mms.continuity_study()
    assert min(s.orders) > 2.8


def test_momentum_study_is_first_order():
    s = mms.momentum_study(dts=(0.05, 0.025))
    assert s.orders[0] > 0.9
