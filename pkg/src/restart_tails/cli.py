"""Batch front-end.

One command per invocation; sweeps are driven by the x grid, so a single
config reproduces a whole curve.  Output is CSV with the resolved config
embedded as comment lines (re-running the embedded config reproduces the
file byte for byte) or the same records as a JSON array.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .asymptotics import classify, evaluate_regime_with, log_asymptote
from .config import COMMANDS, ESTIMATORS, ConfigError, RunConfig, parse_config, render_config
from .distributions import parse_distribution
from .lundberg import gamma_tail_approximation, importance_tail, lundberg_root
from .process import (
    QuadratureParams,
    crude_tail,
    parallel_makespan,
    semi_analytic_tail,
    simulate,
    worker_generators,
)

CSV_COLUMNS = ("x", "point", "stderr", "lower", "upper", "asymptote", "ratio", "n")


@dataclass
class Record:
    """One output row; None fields render as empty CSV cells."""

    x: float = None
    point: float = None
    stderr: float = None
    lower: float = None
    upper: float = None
    asymptote: float = None
    ratio: float = None
    n: int = None

    def csv_row(self) -> str:
        vals = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            vals.append("" if v is None else repr(v) if isinstance(v, float) else str(v))
        return ",".join(vals)

    def json_obj(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS if getattr(self, k) is not None}


def _estimate(cfg: RunConfig, x: float):
    if cfg.estimator == "crude":
        return crude_tail(cfg, x)
    if cfg.estimator == "semi_analytic":
        return semi_analytic_tail(cfg.task, cfg.failure, x,
                                  QuadratureParams(eps_trunc=cfg.eps_trunc))
    rng = worker_generators(cfg.seed, 1)[0]
    return importance_tail(cfg.failure, cfg.t0 if cfg.t0 > 0 else cfg.task.mean(),
                           x, cfg.n, rng)


def _run_records(cfg: RunConfig):
    records = []
    meta = {}
    if cfg.command == "simulate":
        summary = simulate(cfg)
        for i, x in enumerate(cfg.x_grid):
            records.append(Record(x=x, point=float(summary.tail_at[i]),
                                  stderr=float(summary.tail_stderr[i]), n=summary.n))
        meta["histogram"] = [int(c) for c in summary.n_histogram]
        meta["mean_total"] = summary.mean_total
        meta["mean_task"] = summary.mean_task
    elif cfg.command == "gamma":
        for t in cfg.x_grid:
            sol = lundberg_root(cfg.failure, t)
            try:
                approx = gamma_tail_approximation(cfg.failure, t)
            except ValueError:
                approx = None
            records.append(Record(x=t, point=sol.gamma,
                                  stderr=0.0,
                                  asymptote=approx,
                                  ratio=(sol.gamma / approx) if approx else None))
    elif cfg.command == "tail":
        for x in cfg.x_grid:
            est = _estimate(cfg, x)
            records.append(Record(x=x, point=est.point, stderr=est.stderr,
                                  lower=est.lower, upper=est.upper, n=est.n_used))
    elif cfg.command in ("asymptote", "compare"):
        case = classify(cfg.task, cfg.failure)
        meta["case"] = case.case.value
        meta["mode"] = case.mode.value
        meta["theta"] = case.theta
        meta["constants"] = {k: (list(v) if isinstance(v, tuple) else v)
                             for k, v in case.constants.items()}
        for x in cfg.x_grid:
            asym = evaluate_regime_with(case, cfg.task, cfg.failure, x)
            if cfg.command == "asymptote":
                records.append(Record(x=x, asymptote=asym))
            else:
                est = _estimate(cfg, x)
                ratio = est.point / asym if asym > 0.0 else None
                records.append(Record(x=x, point=est.point, stderr=est.stderr,
                                      lower=est.lower, upper=est.upper,
                                      asymptote=asym, ratio=ratio, n=est.n_used))
    elif cfg.command == "classify":
        case = classify(cfg.task, cfg.failure)
        meta["case"] = case.case.value
        meta["mode"] = case.mode.value
        meta["theta"] = case.theta
        meta["constants"] = {k: (list(v) if isinstance(v, tuple) else v)
                             for k, v in case.constants.items()}
    elif cfg.command == "makespan":
        rng = worker_generators(cfg.seed, 1)[0]
        for n_sub in cfg.subjobs:
            samples = parallel_makespan(cfg.task, cfg.failure, n_sub, cfg.n, rng)
            lo, med, hi = np.percentile(samples, [25.0, 50.0, 75.0])
            records.append(Record(x=float(n_sub), point=float(med),
                                  lower=float(lo), upper=float(hi), n=cfg.n))
    else:  # pragma: no cover - guarded by RunConfig
        raise ConfigError(f"unknown command {cfg.command!r}")
    return records, meta


def run(cfg: RunConfig, out, fmt: str = "csv") -> int:
    """Execute a config, writing records to the given text sink.

    Returns a process exit code; library errors produce a structured record
    on stderr and a nonzero code.
    """
    try:
        records, meta = _run_records(cfg)
    except (ConfigError, ValueError, RuntimeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 2
    if fmt == "json":
        payload = {
            "version": __version__,
            "config": render_config(cfg).splitlines(),
            "meta": meta,
            "records": [r.json_obj() for r in records],
        }
        out.write(json.dumps(payload, indent=2) + "\n")
        return 0
    out.write(f"# restart-tails {__version__}\n")
    for line in render_config(cfg).splitlines():
        out.write(f"# {line}\n")
    for key, value in sorted(meta.items()):
        out.write(f"# {key}: {json.dumps(value)}\n")
    out.write(",".join(CSV_COLUMNS) + "\n")
    for rec in records:
        out.write(rec.csv_row() + "\n")
    return 0


def extract_embedded_config(csv_text: str) -> RunConfig:
    """Recover the config embedded in a CSV output's comment header."""
    lines = []
    for line in csv_text.splitlines():
        if not line.startswith("# "):
            continue
        body = line[2:]
        if "=" in body and not body.startswith("restart-tails"):
            lines.append(body)
        elif ":" in body and not body.startswith("restart-tails"):
            continue
    return parse_config("\n".join(lines))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="restart-tails",
        description="Total-time distribution of restartable tasks: simulation, "
                    "geometric-sum analytics, and tail asymptotics.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="config file; flags override its keys")
    parser.add_argument("--task", "--F", dest="task", help="task-time law, e.g. 'exponential(rate=1.0)'")
    parser.add_argument("--failure", "--G", dest="failure", help="failure-time law")
    parser.add_argument("--x-grid", help="comma list or linear(a,b,k) / log(a,b,k)")
    parser.add_argument("--n", type=int, help="sample budget")
    parser.add_argument("--seed", type=int, help="master seed (required for stochastic runs)")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--estimator", choices=ESTIMATORS)
    parser.add_argument("--eps", type=float)
    parser.add_argument("--t0", type=float)
    parser.add_argument("--eps-trunc", type=float)
    parser.add_argument("--subjobs", help="comma list of subjob counts for makespan")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("-o", "--output", help="output path (default: stdout)")
    return parser


def _config_from_args(args) -> RunConfig:
    text_lines = []
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            text_lines.append(fh.read())
    overrides = {
        "command": args.command,
        "F": args.task,
        "G": args.failure,
        "x_grid": args.x_grid,
        "n": args.n,
        "seed": args.seed,
        "workers": args.workers,
        "estimator": args.estimator,
        "eps": args.eps,
        "t0": args.t0,
        "eps_trunc": args.eps_trunc,
        "subjobs": args.subjobs,
    }
    base = text_lines[0] if text_lines else ""
    kept = []
    override_keys = {k for k, v in overrides.items() if v is not None}
    alias = {"F": ("F", "task"), "G": ("G", "failure")}
    for line in base.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if not stripped or "=" not in stripped:
            kept.append(line)
            continue
        key = stripped.partition("=")[0].strip()
        shadowed = key in override_keys or any(
            key in alias.get(k, (k,)) for k in override_keys
        )
        if not shadowed:
            kept.append(line)
    for key, value in overrides.items():
        if value is not None:
            kept.append(f"{key} = {value}")
    return parse_config("\n".join(kept))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            return run(cfg, fh, fmt=args.format)
    return run(cfg, sys.stdout, fmt=args.format)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
