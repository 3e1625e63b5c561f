"""Command-line front end.

Every command resolves its settings as CLI flags > ``--config`` JSON file >
built-in defaults, runs, and writes one data file plus a ``.manifest.json``
beside it.  Exit codes: 0 success, 1 failed validation checks, 2 usage error
(nothing written), 3 numeric failure (manifest with an error record).
"""

from __future__ import annotations

import argparse
import contextlib
import datetime as _dt
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .acceptance import run_checks
from .analysis import boundary_growth_check, completeness_length, curvature_center_sweep
from .errors import DomainError, GrauertError
from .ode import RICCI_FLAT_COLUMNS, IntegratorConfig
from .rescaling import ball_exhaustion_check, exhaustion_experiment, ricci_flat_potential
from .reports import RunManifest, atomic_write, dumps, grid_to_csv, table_to_csv
from .shooting import ShootingConfig, family_sweep, solve_potential
from .spaces import density_fault, space_from_name

OUT_DIR_ENV = "GRAUERT_TUBES_OUT_DIR"
FAULT_ENV = "GRAUERT_TUBES_DENSITY_FAULT"  # test hook: corrupt the sphere density during validate

COMMANDS = ("solve", "ricci-flat", "exhaust", "ball", "completeness", "curvature", "sweep", "validate")

DEFAULTS: dict[str, Any] = {
    "space": None,
    "dim": None,
    "lambda": None,
    "radius": None,
    "radii": None,
    "grid": None,
    "probes": None,
    "hmax": 40.0,
    "tol": 1e-6,
    "out": None,
    "format": "json",
    "jobs": 1,
    "window": None,
    "tmax": None,
    "cutoffs": [1e-1, 1e-2, 1e-3, 1e-4],
}

# flag name -> argparse dest, where they differ
_DEST = {"lambda": "lam"}


class UsageError(Exception):
    pass


def parse_points(text) -> list[float]:
    """Comma list ``"1,2,3"`` or inclusive linspace ``"start:stop:num"``; lists pass through."""
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return np.linspace(float(start), float(stop), int(num)).tolist()
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse point list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="euclidean, hyperbolic, sphere, rp, cp, hp, cayley")
    common.add_argument("--dim", type=int, help="real dimension n of the center manifold")
    common.add_argument("--lambda", dest="lam", type=float, help="Einstein constant (Ricci = -lambda)")
    common.add_argument("--radius", type=float, help="tube radius")
    common.add_argument("--radii", help="increasing radii: 'r1,r2,...' or 'start:stop:num'")
    common.add_argument("--grid", type=int, help="number of uniform output nodes")
    common.add_argument("--probes", help="explicit probe points (same syntax as --radii)")
    common.add_argument("--hmax", type=float, help="blow-up threshold for h (default 40)")
    common.add_argument("--tol", type=float, help="radius tolerance of the shooting (default 1e-6)")
    common.add_argument("--out", help=f"output file (default: ${OUT_DIR_ENV} or cwd, named after the command)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--jobs", type=int, help="worker processes for sweep")
    common.add_argument("--config", help="JSON file with defaults for any of these flags")
    common.add_argument("--window", type=float, help="probe window [0, W] for exhaust")
    common.add_argument("--tmax", type=float, help="range [0, T] for ricci-flat")
    common.add_argument("--cutoffs", help="decreasing distances to the boundary for completeness")

    p = argparse.ArgumentParser(prog="grauert-tubes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "solve the blow-up problem for one radius",
        "ricci-flat": "Ricci-flat potential by quadrature",
        "exhaust": "rescaled exhaustion versus the Ricci-flat limit",
        "ball": "closed-form ball family versus |z|^2",
        "completeness": "radial length towards the boundary",
        "curvature": "center curvature criterion on T^r H^n",
        "sweep": "solve a family of radii",
        "validate": "run the acceptance checks",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def resolve_config(args: argparse.Namespace) -> dict[str, Any]:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, _DEST.get(key, key), None)
        if val is not None:
            cfg[key] = val
    for key in ("radii", "probes", "cutoffs"):
        if cfg[key] is not None:
            cfg[key] = parse_points(cfg[key])
    if cfg["radii"] is not None and any(b <= a for a, b in zip(cfg["radii"], cfg["radii"][1:])):
        raise UsageError("--radii must be strictly increasing")
    if cfg["format"] not in ("json", "csv"):
        raise UsageError(f"unknown format {cfg['format']!r}")
    cfg["command"] = args.command
    return cfg


def _need(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError(f"{cfg['command']} requires " + ", ".join(f"--{k}" for k in missing))


def _space(cfg: dict):
    _need(cfg, "space", "dim")
    return space_from_name(str(cfg["space"]), int(cfg["dim"]))


def _shooting(cfg: dict) -> ShootingConfig:
    return ShootingConfig(integrator=IntegratorConfig(h_max_blowup=float(cfg["hmax"])), radius_tol=float(cfg["tol"]))


def output_path(cfg: dict) -> Path:
    if cfg["out"]:
        return Path(cfg["out"])
    base = Path(os.environ.get(OUT_DIR_ENV) or ".")
    return base / f"{cfg['command']}.{cfg['format']}"


def manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


# --- commands: each returns (payload for json, csv text or None, operations) --------


def cmd_solve(cfg):
    space = _space(cfg)
    _need(cfg, "radius")
    lam = cfg["lambda"] = 1.0 if cfg["lambda"] is None else float(cfg["lambda"])
    r = float(cfg["radius"])
    probes = cfg["probes"]
    if cfg["grid"]:
        probes = sorted(set((probes or []) + np.linspace(0.0, r, int(cfg["grid"]), endpoint=False).tolist()))
    sol = solve_potential(space, lam, r, _shooting(cfg), probes)
    return sol.to_dict(), lambda: grid_to_csv(sol.grid), [{"name": "solve_potential", "status": "ok", "r": r}]


def cmd_sweep(cfg):
    space = _space(cfg)
    _need(cfg, "radii")
    lam = cfg["lambda"] = 1.0 if cfg["lambda"] is None else float(cfg["lambda"])
    jobs = int(cfg["jobs"])
    entries = family_sweep(space, lam, cfg["radii"], _shooting(cfg), cfg["probes"], warm_start=jobs <= 1, jobs=jobs)
    rows = []
    for e in entries:
        s = e.solution
        rows.append(
            {
                "r": e.r,
                "a": None if s is None else s.a,
                "achieved_radius": None if s is None else s.achieved_radius,
                "iterations": None if s is None else s.iterations,
                "error": e.error,
            }
        )
    payload = {"space": space.to_dict(), "lambda": lam, "entries": rows}
    ops = [{"name": f"solve_potential r={e.r!r}", "status": "ok" if e.ok else "failed"} for e in entries]

    def csv_text():
        keys = ["r", "a", "achieved_radius", "iterations", "error"]
        return table_to_csv(keys, ([row[k] for k in keys] for row in rows))

    return payload, csv_text, ops


def cmd_ricci_flat(cfg):
    space = _space(cfg)
    _need(cfg, "tmax")
    K = ricci_flat_potential(space, float(cfg["tmax"]), cfg["probes"], num=int(cfg["grid"] or 201))
    return K.to_dict(), lambda: grid_to_csv(K.grid, RICCI_FLAT_COLUMNS), [{"name": "ricci_flat_potential", "status": "ok"}]


def _convergence_csv(report):
    rows = zip(report.radii, report.sup_gap, report.derivative_gaps["first"], report.derivative_gaps["second"])
    return lambda: table_to_csv(["r", "sup_gap", "first_derivative_gap", "second_derivative_gap"], rows)


def cmd_exhaust(cfg):
    space = _space(cfg)
    _need(cfg, "radii", "window")
    report, _, _ = exhaustion_experiment(space, cfg["radii"], float(cfg["window"]), _shooting(cfg))
    ops = [{"name": f"rescaled r={r!r}", "status": "ok"} for r in report.radii]
    ops += [{"name": f"rescaled r={f['r']!r}", "status": "failed"} for f in report.failures]
    return report.to_dict(), _convergence_csv(report), ops


def cmd_ball(cfg):
    _need(cfg, "dim", "radii")
    probes = cfg["probes"] if cfg["probes"] is not None else [1.0]
    report = ball_exhaustion_check(int(cfg["dim"]), cfg["radii"], probes)
    return report.to_dict(), _convergence_csv(report), [{"name": "ball_exhaustion_check", "status": "ok"}]


def cmd_completeness(cfg):
    cfg["space"] = cfg["space"] or "hyperbolic"
    space = _space(cfg)
    _need(cfg, "radius")
    lam = cfg["lambda"] = float(space.n + 1) if cfg["lambda"] is None else float(cfg["lambda"])
    sol = solve_potential(space, lam, float(cfg["radius"]), _shooting(cfg))
    rep = completeness_length(sol, cfg["cutoffs"])
    payload = rep.to_dict()
    payload["boundary_growth_ok"] = boundary_growth_check(sol).ok
    rows = zip(rep.cutoffs, rep.lengths)
    return payload, lambda: table_to_csv(["cutoff", "length"], rows), [{"name": "completeness_length", "status": "ok"}]


def cmd_curvature(cfg):
    _need(cfg, "dim", "radii")
    sweep = curvature_center_sweep(int(cfg["dim"]), cfg["radii"], _shooting(cfg))
    keys = ["r", "a", "b", "b_from_grid", "threshold", "negative_at_center"]

    def csv_text():
        return table_to_csv(keys, ([getattr(rep, k) for k in keys] for rep in sweep.reports))

    ops = [{"name": f"curvature r={rep.r!r}", "status": "ok"} for rep in sweep.reports]
    ops += [{"name": f"curvature r={f['r']!r}", "status": "failed"} for f in sweep.failures]
    return sweep.to_dict(), csv_text, ops


def cmd_validate(cfg):
    fault = contextlib.nullcontext() if os.environ.get(FAULT_ENV) != "1" else density_fault()
    with fault:
        results = run_checks()
    payload = {
        "passed": all(r.passed for r in results),
        "checks": [{k: v for k, v in r.to_dict().items() if k != "elapsed_s"} for r in results],
    }
    ops = [
        {"name": f"criterion {r.number}", "status": "ok" if r.passed else "failed", "elapsed_s": r.elapsed_s}
        for r in results
    ]

    def csv_text():
        return table_to_csv(["criterion", "title", "passed"], ((r.number, r.title, r.passed) for r in results))

    return payload, csv_text, ops


HANDLERS: dict[str, Callable] = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "ricci-flat": cmd_ricci_flat,
    "exhaust": cmd_exhaust,
    "ball": cmd_ball,
    "completeness": cmd_completeness,
    "curvature": cmd_curvature,
    "validate": cmd_validate,
}


def _echo_config(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if k != "out"}


def run(cfg: dict) -> tuple[int, RunManifest]:
    """Execute a resolved config; returns the exit code and the manifest (already written unless usage failed)."""
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    manifest = RunManifest(__version__, cfg["command"], {}, started_at=started)
    out = output_path(cfg)
    try:
        payload, csv_text, ops = HANDLERS[cfg["command"]](cfg)
    except (UsageError, DomainError) as exc:
        raise UsageError(str(exc)) from None
    except GrauertError as exc:
        manifest.config = _echo_config(cfg)
        manifest.status = "failed"
        manifest.error = {"type": type(exc).__name__, "message": str(exc), "command": cfg["command"]}
        for attr in ("best_a", "last_u"):
            if hasattr(exc, attr):
                manifest.error[attr] = getattr(exc, attr)
        manifest.wall_clock_s = time.perf_counter() - t0
        atomic_write(manifest_path(out), dumps(manifest.to_dict()))
        print(json.dumps(manifest.error), file=sys.stderr)
        return 3, manifest

    manifest.config = _echo_config(cfg)  # handlers fill in defaults they resolve themselves
    text = dumps(payload) if cfg["format"] == "json" else csv_text()
    manifest.outputs[out.name] = atomic_write(out, text)
    manifest.operations = ops
    if any(op["status"] != "ok" for op in ops):
        manifest.status = "partial" if cfg["command"] != "validate" else "failed"
    manifest.wall_clock_s = time.perf_counter() - t0
    atomic_write(manifest_path(out), dumps(manifest.to_dict()))
    code = 0
    if cfg["command"] == "validate" and not payload["passed"]:
        failed = [c["number"] for c in payload["checks"] if not c["passed"]]
        print(f"validation failed: criteria {failed}", file=sys.stderr)
        code = 1
    return code, manifest


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    try:
        cfg = resolve_config(args)
        code, manifest = run(cfg)
    except UsageError as exc:
        parser.error(str(exc))  # status 2, nothing written
    if cfg["command"] != "validate":
        print(f"{manifest.status}: wrote {', '.join(manifest.outputs) or 'no data'} ({manifest.wall_clock_s:.2f}s)")
    return code
