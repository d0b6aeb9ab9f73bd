"""Smoke and behavior tests for the plot commands.

Fixture CSV/JSON files are produced by the banditlab CLI itself (the
external interface of the primary component), so these tests double as an
end-to-end check of the file contracts.
"""

import csv
import json
import subprocess
import sys

import pytest

from banditplots.cli import main

INSTANCE = {
    "support": {"a": 0.0, "b": 1.0},
    "arms": [
        {"mean": 0.96, "dist": {"kind": "bernoulli"}, "lower": 0.95, "upper": 1.0},
        {"mean": 0.2, "dist": {"kind": "bernoulli"}, "lower": 0.0, "upper": 1.0},
    ],
}

LATENT = {
    "contexts_visible": ["z0"],
    "contexts_hidden": ["u1", "u2", "u3"],
    "p_u_given_z": [[0.475, 0.475, 0.05]],
    "means": [
        [[0.998, 0.99, 0.3]],
        [[0.997, 0.985, 1.0]],
        [[0.3, 0.3, 0.3]],
    ],
}


def _banditlab(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "banditlab.cli", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def fixtures(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixtures")
    inst = root / "instance.json"
    inst.write_text(json.dumps(INSTANCE))
    _banditlab(
        "simulate", str(inst), "--policies", "glue,ucb", "--horizon", "2000",
        "--seeds", "60", "--out-prefix", str(root / "run"),
    )
    _banditlab("heatmap", "--l", "0.95", "--grid", "12", "--out", str(root / "heatmap.csv"))
    latent = root / "latent.json"
    latent.write_text(json.dumps(LATENT))
    _banditlab("transfer", "--latent", str(latent), "--out", str(root / "bounds.json"))
    return {
        "aggregate": root / "run_aggregate.csv",
        "traces": root / "run_traces.csv",
        "heatmap": root / "heatmap.csv",
        "bounds": root / "bounds.json",
    }


def _final_means(aggregate_path):
    finals = {}
    with open(aggregate_path, newline="") as fh:
        for row in csv.DictReader(fh):
            finals[row["policy"]] = float(row["mean"])  # last row per policy wins
    return finals


def test_regret_plot_smoke(fixtures, tmp_path):
    out = tmp_path / "regret.svg"
    assert main(["regret", str(fixtures["aggregate"]), "-o", str(out)]) == 0
    body = out.read_text()
    assert out.stat().st_size > 0
    assert "glue" in body and "ucb" in body
    finals = _final_means(fixtures["aggregate"])
    assert finals["glue"] < finals["ucb"]


def test_regret_band_and_log_axis_options(fixtures, tmp_path):
    for extra in (["--band", "quantile"], ["--logx"], ["--title", "curves"]):
        out = tmp_path / f"r{extra[0].strip('-')}.svg"
        assert main(["regret", str(fixtures["aggregate"]), "-o", str(out), *extra]) == 0
        assert out.stat().st_size > 0


def test_regret_single_checkpoint_degenerates_to_markers(tmp_path):
    src = tmp_path / "one.csv"
    src.write_text(
        "policy,checkpoint,mean,stderr,q_lo,q_hi\n"
        "glue,100,1.5,0.1,1.2,1.8\n"
        "ucb,100,3.0,0.2,2.5,3.5\n"
    )
    out = tmp_path / "one.svg"
    assert main(["regret", str(src), "-o", str(out)]) == 0
    assert out.stat().st_size > 0


def test_regret_schema_mismatch_names_column(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("policy,checkpoint,mean\nglue,1,0.0\n")
    assert main(["regret", str(src), "-o", str(tmp_path / "x.svg")]) == 2
    err = capsys.readouterr().err
    assert "stderr" in err and "q_lo" in err


def test_regret_contextual_series_split(tmp_path):
    src = tmp_path / "ctx.csv"
    src.write_text(
        "policy,z,checkpoint,mean,stderr,q_lo,q_hi\n"
        "glue,z0,1,0.0,0.0,0.0,0.0\n"
        "glue,z0,10,1.0,0.1,0.9,1.1\n"
        "glue,z1,1,0.0,0.0,0.0,0.0\n"
        "glue,z1,10,2.0,0.1,1.9,2.1\n"
    )
    out = tmp_path / "ctx.svg"
    assert main(["regret", str(src), "-o", str(out)]) == 0
    body = out.read_text()
    assert "glue@z0" in body and "glue@z1" in body


def test_heatmap_plot_smoke(fixtures, tmp_path):
    out = tmp_path / "heatmap.svg"
    assert main(["heatmap", str(fixtures["heatmap"]), "-o", str(out)]) == 0
    assert out.stat().st_size > 0
    # the fixture grid contains blank cells (mu1 <= mu2) and sub-unit cells
    rows = fixtures["heatmap"].read_text().splitlines()[1:]
    ratios = [r.split(",")[2] for r in rows]
    assert any(v == "" for v in ratios)
    assert any(v and float(v) < 1.0 for v in ratios)


def test_heatmap_all_ones_uniform(tmp_path):
    src = tmp_path / "ones.csv"
    src.write_text(
        "mu1,mu2,ratio\n0.9,0.1,1.0\n0.9,0.2,1.0\n0.95,0.1,1.0\n0.95,0.2,1.0\n"
    )
    out = tmp_path / "ones.svg"
    assert main(["heatmap", str(src), "-o", str(out)]) == 0
    assert out.stat().st_size > 0


def test_bounds_plot_smoke(fixtures, tmp_path):
    out = tmp_path / "bounds.svg"
    assert main(["bounds", str(fixtures["bounds"]), "-o", str(out)]) == 0
    assert out.stat().st_size > 0
    data = json.loads(fixtures["bounds"].read_text())
    arm1 = data["z0"][0]
    assert arm1["lower"] == pytest.approx(0.9593, abs=1e-9)
    assert arm1["upper"] == pytest.approx(0.99425, abs=1e-9)


def test_bounds_plot_with_truth_markers(fixtures, tmp_path):
    truth = tmp_path / "truth.json"
    truth.write_text(json.dumps({"z0": [0.9593, 0.99145, 0.3]}))
    out = tmp_path / "bounds_truth.svg"
    assert main(["bounds", str(fixtures["bounds"]), "-o", str(out), "--truth", str(truth)]) == 0
    assert "true mean" in out.read_text()
    bare = tmp_path / "bounds_bare.svg"
    assert main(["bounds", str(fixtures["bounds"]), "-o", str(bare)]) == 0
    assert "true mean" not in bare.read_text()


def test_bounds_degenerate_interval_renders_tick(tmp_path):
    src = tmp_path / "deg.json"
    src.write_text(json.dumps({"z0": [{"lower": 0.5, "upper": 0.5, "failure_prob": 0.0}]}))
    out = tmp_path / "deg.svg"
    assert main(["bounds", str(src), "-o", str(out)]) == 0
    assert out.stat().st_size > 0


def test_bounds_schema_error(tmp_path):
    src = tmp_path / "bad.json"
    src.write_text(json.dumps({"z0": [{"lower": 0.2}]}))
    assert main(["bounds", str(src), "-o", str(tmp_path / "x.svg")]) == 2


def test_identical_inputs_identical_bytes(fixtures, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["regret", str(fixtures["aggregate"]), "-o", str(a)]) == 0
    assert main(["regret", str(fixtures["aggregate"]), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_png_output(fixtures, tmp_path):
    out = tmp_path / "regret.png"
    assert main(["regret", str(fixtures["aggregate"]), "-o", str(out)]) == 0
    assert out.stat().st_size > 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_missing_input_exits_3(tmp_path, capsys):
    assert main(["regret", "/no/such.csv", "-o", str(tmp_path / "x.svg")]) == 3


def test_console_script_smoke(fixtures, tmp_path):
    out = tmp_path / "cli.svg"
    proc = subprocess.run(
        [sys.executable, "-m", "banditplots.cli", "regret", str(fixtures["aggregate"]),
         "-o", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.stat().st_size > 0
