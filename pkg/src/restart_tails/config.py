"""Experiment configuration: a flat key=value text format and its dataclass.

A config fully determines every stochastic output: the master seed and the
worker count are mandatory for commands that sample.  Unknown keys are
rejected with line numbers so a sweep cannot silently ignore a typo.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .distributions import (
    Distribution,
    PointMass,
    parse_distribution,
    require_failure_role,
)

COMMANDS = ("simulate", "gamma", "tail", "asymptote", "classify", "compare", "makespan")
ESTIMATORS = ("crude", "semi_analytic", "importance")

_DEFAULTS = {
    "workers": 1,
    "n": 10000,
    "estimator": "crude",
    "eps": 0.1,
    "t0": 0.0,
    "eps_trunc": 1e-12,
    "histogram_max": 20,
    "subjobs": (1, 4, 16),
}


class ConfigError(ValueError):
    """Malformed configuration text; message carries the offending line."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved experiment description."""

    task: Distribution
    failure: Distribution
    command: str
    x_grid: tuple
    n: int
    seed: int
    workers: int = 1
    estimator: str = "crude"
    eps: float = 0.1
    t0: float = 0.0
    eps_trunc: float = 1e-12
    histogram_max: int = 20
    subjobs: tuple = (1, 4, 16)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        require_failure_role(self.failure)
        if self.n < 1 or self.workers < 1:
            raise ConfigError("n and workers must be positive")
        grid = tuple(float(x) for x in self.x_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("x_grid must be strictly increasing")
        object.__setattr__(self, "x_grid", grid)
        object.__setattr__(self, "subjobs", tuple(int(s) for s in self.subjobs))
        if any(s < 1 for s in self.subjobs):
            raise ConfigError("subjobs must be positive integers")
        if not (0.0 < self.eps < 1.0):
            raise ConfigError("eps must lie in (0, 1)")
        if not (0.0 < self.eps_trunc < 1.0):
            raise ConfigError("eps_trunc must lie in (0, 1)")

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


def _parse_x_grid(raw: str) -> tuple:
    raw = raw.strip()
    for name in ("linear", "log"):
        if raw.startswith(name + "(") and raw.endswith(")"):
            body = raw[len(name) + 1:-1]
            parts = [p.strip() for p in body.split(",")]
            if len(parts) != 3:
                raise ValueError(f"{name}(start, stop, points) takes three arguments")
            start, stop = float(parts[0]), float(parts[1])
            points = int(parts[2])
            if points < 1 or stop <= start or (name == "log" and start <= 0):
                raise ValueError(f"invalid {name} grid ({raw})")
            import numpy as np

            if name == "linear":
                return tuple(float(v) for v in np.linspace(start, stop, points))
            return tuple(float(v) for v in np.geomspace(start, stop, points))
    return tuple(float(p) for p in raw.split(","))


def parse_config(text: str) -> RunConfig:
    """Parse the key=value lines of a config; '#' starts a comment."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in ("F", "task"):
                values["task"] = parse_distribution(raw)
            elif key in ("G", "failure"):
                failure = parse_distribution(raw)
                if isinstance(failure, PointMass):
                    raise ValueError("PointMass not permitted in role failure")
                values["failure"] = failure
            elif key == "command":
                values["command"] = raw
            elif key == "x_grid":
                values["x_grid"] = _parse_x_grid(raw)
            elif key == "n":
                values["n"] = int(raw)
            elif key == "seed":
                values["seed"] = int(raw)
            elif key == "workers":
                values["workers"] = int(raw)
            elif key == "estimator":
                values["estimator"] = raw
            elif key == "eps":
                values["eps"] = float(raw)
            elif key == "t0":
                values["t0"] = float(raw)
            elif key == "eps_trunc":
                values["eps_trunc"] = float(raw)
            elif key == "histogram_max":
                values["histogram_max"] = int(raw)
            elif key == "subjobs":
                values["subjobs"] = tuple(int(p) for p in raw.split(","))
            else:
                raise ValueError(f"unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc

    for required in ("task", "failure", "command"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    if "seed" not in values:
        raise ConfigError("missing required key 'seed'; stochastic outputs must be reproducible")
    if "x_grid" not in values:
        values["x_grid"] = (1.0,)
    merged = dict(_DEFAULTS)
    merged.update(values)
    try:
        return RunConfig(**merged)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def render_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(render_config(cfg)) equals cfg."""
    lines = [
        f"F = {cfg.task.spec_string()}",
        f"G = {cfg.failure.spec_string()}",
        f"command = {cfg.command}",
        "x_grid = " + ",".join(repr(x) for x in cfg.x_grid),
        f"n = {cfg.n}",
        f"seed = {cfg.seed}",
        f"workers = {cfg.workers}",
        f"estimator = {cfg.estimator}",
        f"eps = {cfg.eps!r}",
        f"t0 = {cfg.t0!r}",
        f"eps_trunc = {cfg.eps_trunc!r}",
        f"histogram_max = {cfg.histogram_max}",
        "subjobs = " + ",".join(str(s) for s in cfg.subjobs),
    ]
    return "\n".join(lines) + "\n"
