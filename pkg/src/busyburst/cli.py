"""Command-line front end: analyze, simulate, estimate, paths.

Every command that writes files puts them in --out together with a
manifest.json recording the invocation; data outputs are byte-stable across
reruns and worker counts for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BusyBurstError, ExcessiveTruncation, NoPositiveRoot
from .est import estimate
from .ldp import (
    busy_exponent,
    check_symmetry,
    predicted_area_path,
    predicted_height_path,
    psi_star,
    psi_star_for_area,
    psi_star_integral,
    varphi_star,
)
from .model import model_from_dict
from .sim import CampaignConfig, fit_tail_offset, simulate_campaign
from .errors import InsufficientData

_EXIT_INPUT = 2
_EXIT_NO_ROOT = 3
_EXIT_TRUNCATION = 4


def _f(x) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_model(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    return model_from_dict(spec)


def _read_series(path: str) -> list[float]:
    values: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            values.append(float(line))
    if not values:
        raise ValueError(f"no numeric data in {path}")
    return values


def _write_outputs(out_dir: str, files: dict[str, str]) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


def _manifest(command: str, args, started: float, seed=None, n_paths=None) -> str:
    return _json_text(
        {
            "command": command,
            "model": getattr(args, "model", None),
            "data": getattr(args, "data", None),
            "seed": seed,
            "n_paths": n_paths,
            "out_dir": args.out,
            "version": __version__,
            "duration_seconds": time.perf_counter() - started,
        }
    )


def _path_rows(lines: list[str], path, as_int: bool = False) -> None:
    for t, v in zip(path.times, path.values):
        tt = str(int(t)) if as_int else _f(t)
        lines.append(f"{tt},{_f(v)},{path.label}\n")


def _cmd_analyze(args) -> int:
    started = time.perf_counter()
    model = _load_model(args.model)
    s = busy_exponent(model)
    sym = check_symmetry(model)
    summary = {
        "kind": model.kind,
        "drift": model.drift(),
        "delta": s.delta,
        "x_star": s.x_star,
        "lambda_star": s.lambda_star,
        "K": s.K,
        "scgf_integral": s.scgf_integral,
        "psi_star_integral": psi_star_integral(model),
        "symmetry": {
            "max_defect": sym.max_defect,
            "symmetric": sym.symmetric,
            "x_star_gap": sym.x_star_gap,
            "tilt_gap": sym.tilt_gap,
        },
    }
    lines = ["t,value,label\n"]
    for theta in np.linspace(0.0, s.lambda_star, args.grid):
        lines.append(f"{_f(theta)},{_f(model.scgf(float(theta)))},scgf\n")
    _path_rows(lines, psi_star(model, np.linspace(0.0, 1.0, args.grid)))
    t_end = args.height / s.x_star + args.height / s.delta
    _path_rows(lines, varphi_star(model, args.height, np.linspace(0.0, t_end, args.grid)))
    _write_outputs(
        args.out,
        {
            "summary.json": _json_text(summary),
            "paths.csv": "".join(lines),
            "manifest.json": _manifest("analyze", args, started),
        },
    )
    return 0


def _resolve_workers(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("BUSYBURST_WORKERS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _cmd_simulate(args) -> int:
    started = time.perf_counter()
    model = _load_model(args.model)
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    thresholds = None
    if args.thresholds:
        thresholds = tuple(float(b) for b in args.thresholds.split(","))
    config = CampaignConfig(
        n_paths=args.paths,
        seed=seed,
        thresholds=thresholds,
        max_steps=args.max_steps,
        workers=_resolve_workers(args.workers),
    )
    result = simulate_campaign(model, config)
    s = busy_exponent(model)
    try:
        kappa = fit_tail_offset(result.table, s.K)
    except InsufficientData:
        kappa = None

    table = result.table
    tail = ["b,count,log_p_emp,log_p_pred,log_p_pred_shifted\n"]
    for b, c in zip(table.thresholds, table.counts):
        emp = _f(math.log(c / table.n_paths)) if c > 0 else ""
        pred = -s.K * math.sqrt(b)
        shifted = _f(pred + kappa) if kappa is not None else ""
        tail.append(f"{_f(b)},{c},{emp},{_f(pred)},{shifted}\n")

    extreme_lines = ["i,value,which\n"]
    rec = result.extremes
    if rec is not None:
        _path_rows(extreme_lines, rec.area_path, as_int=True)
        if rec.area > 0.0:
            _path_rows(extreme_lines, predicted_area_path(model, rec.area), as_int=True)
        _path_rows(extreme_lines, rec.height_path, as_int=True)
        if rec.height > 0.0:
            _path_rows(extreme_lines, predicted_height_path(model, rec.height), as_int=True)

    summary = {
        "n_paths": table.n_paths,
        "seed": seed,
        "n_truncated": table.n_truncated,
        "kappa": kappa,
        "K": s.K,
        "lambda_star": s.lambda_star,
        "delta": s.delta,
        "x_star": s.x_star,
        "mean_tau": result.mean_tau,
        "mean_positive_area": result.mean_positive_area,
        "record_area": rec.area if rec is not None else None,
        "record_height": rec.height if rec is not None else None,
    }
    _write_outputs(
        args.out,
        {
            "tail.csv": "".join(tail),
            "extremes.csv": "".join(extreme_lines),
            "summary.json": _json_text(summary),
            "manifest.json": _manifest("simulate", args, started, seed=seed, n_paths=args.paths),
        },
    )
    return 0


def _cmd_estimate(args) -> int:
    started = time.perf_counter()
    series = _read_series(args.data)
    report = estimate(series, kind=args.kind)
    text = _json_text(
        {
            "kind": report.kind,
            "n": report.n,
            "drift": report.drift,
            "lambda_star": report.lambda_star,
            "K": report.K,
            "scgf_integral": report.scgf_integral,
            "bracket_low": report.bracket_low,
            "bracket_high": report.bracket_high,
            "theta_max": report.theta_max,
        }
    )
    sys.stdout.write(text)
    if args.out:
        _write_outputs(
            args.out,
            {
                "report.json": text,
                "manifest.json": _manifest("estimate", args, started, n_paths=None),
            },
        )
    return 0


def _cmd_paths(args) -> int:
    started = time.perf_counter()
    model = _load_model(args.model)
    s = busy_exponent(model)
    lines = ["t,value,label\n"]
    _path_rows(lines, psi_star(model, np.linspace(0.0, 1.0, args.grid)))
    if args.area is not None:
        scaled = psi_star_for_area(model, args.area)
        _path_rows(lines, scaled)
        _path_rows(lines, predicted_area_path(model, args.area), as_int=True)
    if args.height is not None:
        t_end = args.height / s.x_star + args.height / s.delta
        _path_rows(lines, varphi_star(model, args.height, np.linspace(0.0, t_end, args.grid)))
        _path_rows(lines, predicted_height_path(model, args.height), as_int=True)
    _write_outputs(
        args.out,
        {
            "paths.csv": "".join(lines),
            "manifest.json": _manifest("paths", args, started),
        },
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="busyburst",
        description="Busy-period tail exponents, optimal cycle shapes, simulation, estimation.",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("analyze", help="exponents and theory curves for a model")
    p.add_argument("--model", required=True, help="model spec JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--height", type=float, default=1.0, help="level for the tent profile")
    p.add_argument("--grid", type=int, default=1001, help="points per curve")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("simulate", help="busy-cycle tail campaign")
    p.add_argument("--model", required=True)
    p.add_argument("--paths", type=int, required=True, help="number of cycles")
    p.add_argument("--seed", type=int, default=None, help="base seed (default: fresh entropy)")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: BUSYBURST_WORKERS, else CPU count)")
    p.add_argument("--thresholds", default=None, help="comma-separated area thresholds")
    p.add_argument("--max-steps", type=int, default=100_000_000, dest="max_steps")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="plug-in exponents from an increment series")
    p.add_argument("--data", required=True, help="text file, one increment per line")
    p.add_argument("--kind", choices=("iid", "markov"), default="iid")
    p.add_argument("--out", default=None, help="also write report.json here")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("paths", help="theory cycle profiles on explicit grids")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--area", type=float, default=None, help="area for the rescaled profile")
    p.add_argument("--height", type=float, default=None, help="level for the tent profile")
    p.add_argument("--grid", type=int, default=1001)
    p.set_defaults(func=_cmd_paths)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return _EXIT_INPUT
    try:
        return args.func(args)
    except NoPositiveRoot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_NO_ROOT
    except ExcessiveTruncation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_TRUNCATION
    except (BusyBurstError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
