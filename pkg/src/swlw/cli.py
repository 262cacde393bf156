"""Command line entry point: ``swlw simulate | verify | mms``.

Exit codes: 0 ok, 1 failed verification or unexpected simulation error,
2 configuration error, 3 invariant violation, 4 divergence (Picard, inner
solve or CFL).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import echo, load_config
from .errors import ConfigError, SimulationError
from .grid import Grid
from .io import CsvSink, SnapshotSink, write_snapshot
from .scenarios import build, perturbed_pair
from .stepper import run, run_pair

log = logging.getLogger("swlw")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _dump(obj, fh=None):
    fh = fh or sys.stdout
    json.dump(obj, fh, indent=2, default=_json_default)
    fh.write("\n")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    for w in cfg.warnings:
        log.warning(w)
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = Grid(cfg.n)
    kwargs = cfg.scenario_kwargs()
    state = build(cfg.scenario, grid, **kwargs)
    (out / "config_echo.json").write_text(json.dumps(echo(cfg), indent=2, default=_json_default))

    sinks = []
    csv_sink = CsvSink(out / "diagnostics.csv")
    sinks.append(csv_sink)
    if cfg.snapshot_interval:
        sinks.append(SnapshotSink(out, cfg.snapshot_interval))
    try:
        summary = run(state, cfg.t_end, cfg.step, cfg.model, sinks=sinks)
    except SimulationError as exc:
        last = getattr(exc, "last_state", None)
        if last is not None:
            write_snapshot(out / "failure_state.bin", last)
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    finally:
        csv_sink.close()
    write_snapshot(out / "final.bin", summary.final)

    result = {"steps": summary.steps, "t": summary.final.t,
              "u_max": float(np.abs(summary.final.u).max()),
              "max_picard_iterations": summary.max_picard_iterations,
              "final_rel_residual": summary.ledger[-1]["rel_residual"]}
    if cfg.scenario == "perturbed-pair":
        a, b = perturbed_pair(grid, **kwargs)
        rows = run_pair(a, b, cfg.t_end, cfg.step, cfg.model)
        with CsvSink(out / "relative_energy.csv", columns=tuple(rows[0])) as rel:
            for i, row in enumerate(rows):
                rel.write(i, row)
        result["relative_energy"] = rows[-1]["composite"]
    (out / "summary.json").write_text(json.dumps(result, indent=2, default=_json_default))
    _dump(result)
    return 0


def cmd_verify(args) -> int:
    from .verification.suites import SUITES, run_suite

    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        log.error("unknown suite %r; available: %s, all", args.suite, ", ".join(SUITES))
        return 2
    reports = [run_suite(n) for n in names]
    payload = reports[0] if len(reports) == 1 else {"suites": reports,
                                                    "passed": all(r["passed"] for r in reports)}
    _dump(payload)
    return 0 if all(r["passed"] for r in reports) else 1


def cmd_mms(args) -> int:
    from .verification import mms

    cfg = load_config(args.config)
    if args.levels < 2:
        raise ConfigError(["levels: need at least 2 refinement levels"])
    base = cfg.step.dt

    def ladder(dt0):
        return tuple(dt0 / 2**i for i in range(args.levels))

    results = {
        "continuity": mms.continuity_study(dts=ladder(0.05)).as_dict(),
        "momentum": mms.momentum_study(dts=ladder(0.05)).as_dict(),
        "nls": mms.nls_study(counts=tuple(10 * 2**i for i in range(args.levels))).as_dict(),
        "coupled": mms.coupled_study(n=cfg.n, t_end=max(cfg.t_end, 4 * base),
                                     dts=ladder(base) + (base / 2**args.levels,),
                                     params=cfg.model).as_dict(),
        "spatial_floor": mms.spatial_floor(params=cfg.model.fluid),
    }
    _dump(results)
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swlw", description="Short wave-long wave MHD simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a configured scenario")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run an acceptance suite and print JSON")
    v.add_argument("--suite", required=True)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("mms", help="manufactured-solution convergence tables")
    m.add_argument("--config", required=True)
    m.add_argument("--levels", type=int, default=3)
    m.set_defaults(func=cmd_mms)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            log.error("config: %s", problem)
        return exc.exit_code
    except SimulationError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
