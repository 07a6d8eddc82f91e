import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from restart_tails import cli
from restart_tails.config import ConfigError, RunConfig, parse_config, render_config
from restart_tails.distributions import Exponential, Pareto, Uniform

BASE = """
F = exponential(rate=1.0)
G = exponential(rate=1.0)
command = simulate
x_grid = 5,10,20
n = 5000
seed = 99
"""


def test_parse_minimal_config():
    cfg = parse_config(BASE)
    assert cfg.task == Exponential(1.0)
    assert cfg.command == "simulate"
    assert cfg.x_grid == (5.0, 10.0, 20.0)
    assert cfg.workers == 1 and cfg.estimator == "crude"


def test_parse_rejects_pointmass_failures():
    with pytest.raises(ConfigError, match="PointMass not permitted"):
        parse_config(BASE.replace("G = exponential(rate=1.0)", "G = pointmass(location=1)"))


def test_parse_requires_seed():
    text = "\n".join(line for line in BASE.splitlines() if not line.startswith("seed"))
    with pytest.raises(ConfigError, match="seed"):
        parse_config(text)


def test_parse_unknown_key_has_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("F = exponential(rate=1.0)\nbudget = 3\n")


def test_parse_malformed_value_has_line_number():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("F = exponential(rate=fast)\n" + BASE)


def test_parse_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(BASE + "\nn = 10\n")


def test_parse_grid_forms():
    cfg = parse_config(BASE.replace("x_grid = 5,10,20", "x_grid = linear(1, 3, 3)"))
    assert cfg.x_grid == (1.0, 2.0, 3.0)
    cfg = parse_config(BASE.replace("x_grid = 5,10,20", "x_grid = log(1, 100, 3)"))
    assert cfg.x_grid == pytest.approx((1.0, 10.0, 100.0))
    with pytest.raises(ConfigError):
        parse_config(BASE.replace("x_grid = 5,10,20", "x_grid = 5,5,20"))


def test_render_parse_roundtrip():
    cfg = parse_config(BASE)
    assert parse_config(render_config(cfg)) == cfg
    cfg2 = cfg.with_overrides(task=Pareto(2.0, 1.0, 0.5), eps=0.25,
                              x_grid=(1.5, 2.25, 97.0), subjobs=(2, 8))
    assert parse_config(render_config(cfg2)) == cfg2


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 10**7),
    seed=st.integers(0, 2**62),
    workers=st.integers(1, 32),
    eps=st.floats(1e-6, 0.99),
    rate=st.floats(0.01, 99.0),
    grid=st.lists(st.floats(0.01, 1e6), min_size=1, max_size=6, unique=True),
)
def test_roundtrip_property(n, seed, workers, eps, rate, grid):
    cfg = RunConfig(
        task=Exponential(rate),
        failure=Exponential(1.0),
        command="tail",
        x_grid=tuple(sorted(grid)),
        n=n,
        seed=seed,
        workers=workers,
        eps=eps,
    )
    assert parse_config(render_config(cfg)) == cfg


def run_to_text(cfg, fmt="csv"):
    buf = io.StringIO()
    code = cli.run(cfg, buf, fmt=fmt)
    return code, buf.getvalue()


def test_run_simulate_csv_shape():
    cfg = parse_config(BASE)
    code, text = run_to_text(cfg)
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# restart-tails")
    header_idx = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert lines[header_idx] == "x,point,stderr,lower,upper,asymptote,ratio,n"
    rows = lines[header_idx + 1:]
    assert len(rows) == 3
    # absent fields are empty cells, not zeros
    assert rows[0].split(",")[5] == ""


def test_run_deterministic_bytes():
    cfg = parse_config(BASE)
    assert run_to_text(cfg) == run_to_text(cfg)


def test_embedded_config_reproduces_file():
    cfg = parse_config(BASE)
    _, text = run_to_text(cfg)
    cfg2 = cli.extract_embedded_config(text)
    _, text2 = run_to_text(cfg2)
    assert text2 == text


def test_run_classify_record():
    cfg = parse_config(BASE).with_overrides(
        task=Pareto(2.0, 1.0, 0.0), failure=Pareto(1.0, 2.0, 0.0), command="classify")
    code, text = run_to_text(cfg, fmt="json")
    assert code == 0
    payload = json.loads(text)
    assert payload["meta"]["case"] == "power-density/power-tail"
    assert payload["meta"]["theta"] == 2.0
    assert payload["meta"]["mode"] == "logarithmic"


def test_run_compare_ratio_trends_to_one():
    cfg = parse_config(BASE).with_overrides(
        command="compare", estimator="semi_analytic",
        x_grid=(100.0, 1000.0, 10000.0))
    code, text = run_to_text(cfg, fmt="json")
    assert code == 0
    ratios = [rec["ratio"] for rec in json.loads(text)["records"]]
    assert abs(ratios[2] - 1.0) < abs(ratios[0] - 1.0)
    assert ratios[2] == pytest.approx(1.0, abs=0.01)


def test_run_gamma_command():
    cfg = parse_config(BASE).with_overrides(command="gamma", x_grid=(5.0, 10.0, 20.0))
    code, text = run_to_text(cfg, fmt="json")
    records = json.loads(text)["records"]
    ratios = [r["ratio"] for r in records]
    assert ratios[0] > ratios[1] > ratios[2] >= 1.0


def test_run_makespan_command():
    cfg = parse_config(BASE).with_overrides(command="makespan", n=2000, subjobs=(1, 4, 16))
    code, text = run_to_text(cfg, fmt="json")
    medians = [r["point"] for r in json.loads(text)["records"]]
    assert medians[0] < medians[1] < medians[2]


def test_run_error_is_structured(capsys):
    cfg = parse_config(BASE).with_overrides(
        task=Exponential(1.0), failure=Uniform(0.0, 1.0), command="tail",
        estimator="semi_analytic", x_grid=(10.0,))
    buf = io.StringIO()
    code = cli.run(cfg, buf)
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "RootError"


def test_main_flag_overrides(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(BASE)
    out_file = tmp_path / "out.csv"
    code = cli.main([
        "simulate", "--config", str(cfg_file), "--n", "1000",
        "--seed", "7", "-o", str(out_file),
    ])
    assert code == 0
    text = out_file.read_text()
    assert "# n = 1000" in text
    assert "# seed = 7" in text


def test_main_rejects_missing_seed(capsys):
    code = cli.main(["simulate", "--task", "exponential(rate=1)",
                     "--failure", "exponential(rate=1)"])
    assert code == 2
    assert "seed" in capsys.readouterr().err
