import numpy as np
import pytest

from swlw.diagnostics import (
    COMPONENTS,
    LEDGER_COLUMNS,
    EnergyTracker,
    RelativeEnergyTracker,
    bounds_report,
    dissipation,
    energy_identity_check,
    flux_stats,
    jrho_check,
    refinement_ratio,
    relative_energy,
    total_energy,
)
from swlw.grid import Grid
from swlw.momentum import effective_flux
from swlw.scenarios import equilibrium, smooth_random
from swlw.state import ModelParams

TWO_PI = 2 * np.pi
PARAMS = ModelParams()


def test_equilibrium_energy_components(grid16):
    rho, A = 1.1, 0.9
    st = equilibrium(grid16, amplitude=A, rho=rho)
    e = total_energy(st, PARAMS)
    fp, spec = PARAMS.fluid, PARAMS.coupling
    assert e.kinetic == 0 and e.magnetic == 0
    assert e.internal == pytest.approx(fp.a * rho**fp.gamma / (fp.gamma - 1))
    assert e.psi_gradient == pytest.approx(TWO_PI**2 * A**2)
    assert e.psi_quartic == pytest.approx(0.5 * A**4)
    assert e.coupling == pytest.approx(float(spec.g_eval(1 / rho) * spec.h_eval(A**2)))
    assert e.total == pytest.approx(sum(e.as_dict().values()))
    assert tuple(e.as_dict()) == COMPONENTS


def test_dissipation_closed_form(grid16):
    x1, x2 = grid16.x
    st = equilibrium(grid16)
    u = np.stack([np.sin(TWO_PI * x2), np.zeros(grid16.shape)])  # divergence free
    H = np.stack([np.zeros(grid16.shape), 0.5 * np.sin(TWO_PI * x1)])
    st = st.replace(u=u, H=H)
    expect = PARAMS.fluid.mu * 2 * np.pi**2 + PARAMS.magnetic.nu * 0.25 * 2 * np.pi**2
    assert dissipation(st, PARAMS) == pytest.approx(expect)


def test_dissipation_compressive_part(grid16):
    x1 = grid16.x[0]
    st = equilibrium(grid16).replace(u=np.stack([np.sin(TWO_PI * x1), np.zeros(grid16.shape)]))
    fp = PARAMS.fluid
    # mu |grad u|^2 + (lambda + mu) (div u)^2 with rho = 1
    expect = (2 * fp.mu + fp.b) * 2 * np.pi**2
    assert dissipation(st, PARAMS) == pytest.approx(expect)


@pytest.mark.parametrize("theta", [0.1, 1.0, np.pi])
def test_relative_energy_of_a_phase_shift(grid16, theta):
    a = smooth_random(grid16)
    b = a.replace(psi=a.psi * np.exp(1j * theta))
    r = relative_energy(a, b)
    m = np.mean(np.abs(a.psi) ** 2)
    assert r["wave"] == pytest.approx(2 * (1 - np.cos(theta)) * m)
    assert r["density"] == r["velocity"] == r["magnetic"] == 0
    assert r["instant"] == pytest.approx(r["wave"])


def test_relative_energy_is_quadratic(grid16):
    a = smooth_random(grid16)
    du = np.stack([np.ones(grid16.shape), np.zeros(grid16.shape)])
    r1 = relative_energy(a, a.replace(u=a.u + 1e-3 * du))["velocity"]
    r2 = relative_energy(a, a.replace(u=a.u + 5e-4 * du))["velocity"]
    assert r1 / r2 == pytest.approx(4.0)
    assert r1 == pytest.approx(1e-6 * a.rho.mean())
    with pytest.raises(ValueError):
        relative_energy(a, smooth_random(Grid(8)))


def test_relative_tracker_integrates_gradient_gaps(grid16):
    a = smooth_random(grid16)
    x1 = grid16.x[0]
    b = a.replace(u=a.u + np.stack([np.sin(TWO_PI * x1), np.zeros(grid16.shape)]))
    tr = RelativeEnergyTracker(a, b)
    tr.update(a, b, 0.1)
    rep = tr.report()
    assert rep["grad_u_cum"] == pytest.approx(0.1 * 2 * np.pi**2)
    assert rep["grad_H_cum"] == 0
    assert rep["composite"] == pytest.approx(rep["instant"] + rep["grad_u_cum"])


def test_energy_identity_check_on_synthetic_rows():
    rows = [{"energy": 2.0, "dissipation_cum": 0.0}, {"energy": 1.5, "dissipation_cum": 0.5},
            {"energy": 1.0, "dissipation_cum": 0.9}]
    np.testing.assert_allclose(energy_identity_check(rows), [0.0, 0.0, 0.05])
    assert energy_identity_check([]).size == 0
    assert refinement_ratio(4.0, 1.0) == 4.0
    assert refinement_ratio(1.0, 0.0) == float("inf")


def test_tracker_row_has_ledger_columns(grid16):
    st = smooth_random(grid16)
    tr = EnergyTracker(st, PARAMS)
    row = tr.row
    assert tuple(row) == LEDGER_COLUMNS
    assert row["residual"] == 0 and row["E_bound"] == 1.0
    D0 = tr.D
    tr.update(st, 0.1)
    assert tr.D_cum == pytest.approx(0.1 * D0)


def test_bounds_at_initial_time(grid16):
    st = smooth_random(grid16)
    b = bounds_report(st)
    assert b.rho_min == pytest.approx(0.8) and b.rho_max == pytest.approx(1.2)
    assert b.jrho_within(st.rho0)
    assert b.E_inf == pytest.approx(1.0)
    assert jrho_check(st) < 1e-12


def test_flux_stats_keys(grid16):
    st = smooth_random(grid16)
    flux = effective_flux(grid16, st.u, st.rho, st.H, np.zeros(grid16.shape), PARAMS.fluid)
    stats = flux_stats(flux)
    assert set(stats) == {"F", "omega", "Lambda"}
    assert stats["omega"]["mean"] == pytest.approx(0, abs=1e-14)
