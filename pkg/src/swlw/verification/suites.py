"""Verification suites. Each returns a JSON-ready dict with a ``passed`` flag,
the thresholds applied and the measured values.

Runs shared between suites (the smooth-random histories) are cached for the
life of the process.
"""
from __future__ import annotations

import time
from dataclasses import replace
from functools import lru_cache

import numpy as np

from ..coupling import CouplingSpec
from ..diagnostics import energy_identity_check, jrho_check
from ..grid import Grid
from ..lagrangian import eb_identity_error, inverse_identity_error, liouville_gap
from ..scenarios import equilibrium, perturbed_pair, plane_wave, shear, smooth_random
from ..state import ModelParams
from ..stepper import RunSummary, StepConfig, run, run_pair
from . import mms
from .oracles import ReferenceNavierStokes, split_step_nls


class _StateProbe:
    """Sink recording per-step divergence of H and the state masses."""

    def __init__(self):
        self.div_H = []
        self.mass_rho = []
        self.mass_psi = []

    def __call__(self, rec):
        self.div_H.append(rec.ledger["divH_inf"])
        self.mass_rho.append(rec.ledger["mass_rho"])
        self.mass_psi.append(rec.ledger["mass_psi"])


_DIV_H_SEEN: list[float] = []


def _run(initial, t_end, config, params) -> tuple[RunSummary, _StateProbe]:
    """Run with a diagnostic row at every step so the probe sees each accepted state."""
    probe = _StateProbe()
    config = replace(config, diagnostic_interval=1)
    summary = run(initial, t_end, config, params, sinks=[probe])
    _DIV_H_SEEN.append(max(probe.div_H))
    return summary, probe


@lru_cache(maxsize=None)
def smooth_random_history(n: int = 64, dt: float = 1e-3, t_end: float = 0.2, seed: int = 0,
                          beta: float = 2.0):
    params = ModelParams()
    if beta != params.fluid.beta:
        params = ModelParams(fluid=replace(params.fluid, beta=beta))
    return _run(smooth_random(Grid(n), seed=seed), t_end, StepConfig(dt=dt), params)


VACUUM_DT, VACUUM_T = 1e-3, 0.5


def _history(n: int, dt: float, t: float):
    """Smooth-random run reaching ``t``; the ``dt = 1e-3`` run is shared with
    the vacuum monitor, so it always extends to its horizon."""
    horizon = max(t, VACUUM_T) if dt == VACUUM_DT else t
    return smooth_random_history(n, dt, horizon)


def _rows_until(summary: RunSummary, t: float) -> list[dict]:
    return [r for r in summary.ledger if r["t"] <= t + 1e-9]


# -- criteria ------------------------------------------------------------------

def equilibrium_suite(n=64, dt=1e-3, t_end=0.1, amplitude=1.0, k=(1, 0)) -> dict:
    params = ModelParams()
    g = Grid(n)
    start = time.perf_counter()
    summary, _ = _run(equilibrium(g, amplitude, k), t_end, StepConfig(dt=dt), params)
    elapsed = time.perf_counter() - start
    f = summary.final
    spec = params.coupling
    omega = ((2 * np.pi) ** 2 * (k[0] ** 2 + k[1] ** 2) + amplitude**2
             + spec.alpha * float(spec.g_eval(1.0)) * float(spec.h_prime(amplitude**2)))
    exact = plane_wave(g, amplitude, k) * np.exp(-1j * omega * f.t)
    m = {
        "u_max": float(np.abs(f.u).max()),
        "rho_dev": float(np.abs(f.rho - 1.0).max()),
        "phase_error": float(np.abs(f.psi - exact).max()),
        "omega": omega,
        "runtime_s": elapsed,
    }
    ok = m["u_max"] <= 1e-8 and m["rho_dev"] <= 1e-10 and m["phase_error"] <= 1e-6 \
        and elapsed <= 30.0
    return {"suite": "equilibrium", "passed": bool(ok), "metrics": m}


def energy_suite(n=64, t_end=0.2, dts=(1e-3, 5e-4)) -> dict:
    res = []
    for dt in dts:
        summary, _ = _history(n, dt, t_end)
        res.append(float(energy_identity_check(_rows_until(summary, t_end))[-1]))
    ratio = res[0] / res[1] if res[1] > 0 else float("inf")
    m = {"dt": list(dts), "rel_residual": res, "refinement_ratio": ratio}
    ok = res[0] <= 5e-4 and ratio >= 1.8
    return {"suite": "energy", "passed": bool(ok), "metrics": m}


def conservation_suite(n=64, dt=1e-3, t_end=0.5) -> dict:
    _, probe = _history(n, dt, t_end)
    mr = np.array(probe.mass_rho)
    mp = np.array(probe.mass_psi)
    m = {
        "rho_mass_step_drift": float(np.max(np.abs(np.diff(mr)))),
        "psi_mass_drift": float(np.max(np.abs(mp - mp[0]))),
    }
    ok = m["rho_mass_step_drift"] <= 1e-12 and m["psi_mass_drift"] <= 1e-11
    return {"suite": "conservation", "passed": bool(ok), "metrics": m}


def lagrangian_errors(n: int, dt: float, t_end: float = 0.5) -> dict:
    g = Grid(n)
    summary, _ = _run(shear(g), t_end, StepConfig(dt=dt, diagnostic_interval=10**9),
                      ModelParams())
    f = summary.final
    return {
        "jrho": jrho_check(f),
        "inverse_identity": inverse_identity_error(g, f.flow),
        "eb_identity": eb_identity_error(g, f.flow),
        "liouville": liouville_gap(g, f.flow),
    }


def lagrangian_suite(dt=2e-3, t_end=0.5, resolutions=(64, 128)) -> dict:
    coarse = lagrangian_errors(resolutions[0], dt, t_end)
    fine = lagrangian_errors(resolutions[1], dt, t_end)
    ok = all(v <= 1e-4 for v in coarse.values()) and all(fine[k] <= 0.5 * coarse[k]
                                                        for k in coarse)
    return {"suite": "lagrangian", "passed": bool(ok),
            "metrics": {"coarse": coarse, "fine": fine, "n": list(resolutions), "dt": dt}}


def contraction_suite(n=64, t_end=0.2, dts=(1e-3, 5e-4)) -> dict:
    s1, _ = _history(n, dts[0], t_end)
    s2, _ = _history(n, dts[1], t_end)
    m = {
        "max_iterations": s1.max_picard_iterations,
        "max_ratio": max(r.max_ratio for r in s1.reports),
        "first_ratio": [s1.reports[0].contraction_ratios[0], s2.reports[0].contraction_ratios[0]],
        "ratios_first_step": list(s1.reports[0].contraction_ratios),
    }
    ok = m["max_iterations"] <= 8 and m["max_ratio"] < 0.5 and \
        m["first_ratio"][1] < m["first_ratio"][0]
    return {"suite": "contraction", "passed": bool(ok), "metrics": m}


def dependence_suite(n=64, dt=1e-3, t_end=0.2, delta=1e-3) -> dict:
    g = Grid(n)
    cfg = StepConfig(dt=dt, diagnostic_interval=10**9)
    params = ModelParams()
    out = {}
    for label, d in (("delta", delta), ("half", 0.5 * delta)):
        a, b = perturbed_pair(g, d)
        out[label] = run_pair(a, b, t_end, cfg, params)[-1]
    ratio = out["delta"]["composite"] / out["half"]["composite"]
    m = {"composite": [out["delta"]["composite"], out["half"]["composite"]],
         "ratio": ratio,
         "terms_delta": out["delta"], "terms_half": out["half"]}
    return {"suite": "dependence", "passed": bool(3.4 <= ratio <= 4.6), "metrics": m}


def vacuum_suite(n=64, dt=VACUUM_DT, t_end=VACUUM_T) -> dict:
    summary, _ = _history(n, dt, t_end)
    rows = summary.ledger
    m = {"rho_min": min(r["rho_min"] for r in rows), "rho_max": max(r["rho_max"] for r in rows),
         "initial_range": [rows[0]["rho_min"], rows[0]["rho_max"]]}
    ok = m["rho_min"] >= 0.4 and m["rho_max"] <= 2.4
    return {"suite": "vacuum", "passed": bool(ok), "metrics": m}


def decoupling_suite(n=64, dt=1e-3, t_end=0.1) -> dict:
    g = Grid(n)
    steps = int(round(t_end / dt))
    ns_params = ModelParams(coupling=CouplingSpec(alpha=0.0))
    init = smooth_random(g)
    init = init.replace(H=np.zeros_like(init.H))
    summary, _ = _run(init, t_end, StepConfig(dt=dt, diagnostic_interval=10**9), ns_params)
    fp = ns_params.fluid
    ref = ReferenceNavierStokes(n, fp.a, fp.gamma, fp.mu, fp.b, fp.beta)
    r_rho, r_u = ref.run(init.rho, init.u, dt, steps)
    ns_gap = max(float(np.abs(summary.final.rho - r_rho).max()),
                 float(np.abs(summary.final.u - r_u).max()))

    params = ModelParams()
    wave0 = smooth_random(g)
    frozen, _ = _run(wave0, t_end, StepConfig(dt=dt, freeze_velocity=True,
                                              diagnostic_interval=10**9), params)
    spec = params.coupling
    ref_psi = split_step_nls(wave0.psi, 1.0 / wave0.rho0, dt, steps, spec.alpha, spec.g_eval,
                             spec.h_prime)
    nls_gap = float(np.abs(frozen.final.psi - ref_psi).max())
    m = {"navier_stokes_gap": ns_gap, "nls_gap": nls_gap}
    return {"suite": "decoupling", "passed": bool(ns_gap <= 1e-8 and nls_gap <= 1e-10),
            "metrics": m}


def mms_suite() -> dict:
    studies = {name: f().as_dict() for name, f in mms.STUDIES.items()}
    floor = mms.spatial_floor()
    need = {"nls": 1.9, "momentum": 0.9, "coupled": 0.9, "continuity": 2.9}
    ok = all(min(studies[k]["order"]) >= v for k, v in need.items()) and \
        max(floor.values()) <= 1e-10
    return {"suite": "mms", "passed": bool(ok),
            "metrics": {"studies": studies, "spatial_floor": floor, "required_order": need}}


def solenoidal_suite() -> dict:
    """Largest ``|div H|_inf`` over every accepted step of every run made so far
    in this process (runs the equilibrium and smooth-random suites if none)."""
    if not _DIV_H_SEEN:
        equilibrium_suite()
        _history(64, VACUUM_DT, VACUUM_T)
    worst = max(_DIV_H_SEEN)
    return {"suite": "solenoidal", "passed": bool(worst <= 1e-10),
            "metrics": {"max_div_H": worst, "runs": len(_DIV_H_SEEN)}}


SUITES = {
    "equilibrium": equilibrium_suite,
    "energy": energy_suite,
    "conservation": conservation_suite,
    "solenoidal": solenoidal_suite,
    "lagrangian": lagrangian_suite,
    "contraction": contraction_suite,
    "dependence": dependence_suite,
    "vacuum": vacuum_suite,
    "decoupling": decoupling_suite,
    "mms": mms_suite,
}


def run_suite(name: str) -> dict:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(SUITES)}") from None
    return fn()
