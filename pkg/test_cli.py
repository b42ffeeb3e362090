"""
Tests for the command-line entry point, run in-process through main(argv).
"""

import filecmp
import json
import math
import sys

import numpy as np
import pandas as pd
import pytest

import ellipseqed
from cavity_config import DEFAULTS
from errors import AccuracyError

MILD = ["--eps", "0.5", "--kappa-eg", "20pi", "--gamma-tau", "2", "--phase-d", "0.6"]


def _run(argv):
    return ellipseqed.main(argv)


def test_presets_mode_lists_registry(capsys):
    assert _run(["--mode", "presets"]) == ellipseqed.EXIT_OK
    out = capsys.readouterr().out
    for name in ("fig2a", "fig2b", "fig2c", "fig3", "parabolic-limit", "single-atom-decay"):
        assert name in out


def test_single_run_writes_csv_and_sidecar(tmp_path):
    out = tmp_path / "run.csv"
    status = _run(MILD + ["--tmax", "1", "--points", "21", "--out", str(out), "--quiet"])
    assert status == ellipseqed.EXIT_OK

    frame = pd.read_csv(out)
    assert list(frame.columns) == ["t_over_tau", "P1", "P2", "reB1", "imB1", "reB2", "imB2"]
    assert len(frame) == 21
    assert frame["t_over_tau"].iloc[-1] == 1.0
    assert frame["P1"].iloc[0] == 1.0

    sidecar = json.loads((tmp_path / "run.json").read_text(encoding="utf-8"))
    assert sidecar["run"]["scenario"]["eps"] == 0.5
    assert sidecar["run"]["counters"]["grid_points"] == 21
    assert sidecar["run"]["diagnostics"]["cavity"]["f_over_d"] == 0.5
    assert sidecar["series"]["pathsum"]["metadata"]["tail_bound_kind"] == "heuristic"
    assert str(out) in sidecar["run"]["outputs"]


def test_isolated_run_is_pure_decay(tmp_path):
    out = tmp_path / "decay.csv"
    status = _run(["--preset", "single-atom-decay", "--tmax", "2", "--points", "11",
                   "--out", str(out), "--quiet"])
    assert status == ellipseqed.EXIT_OK
    frame = pd.read_csv(out)
    assert np.allclose(frame["P1"], np.exp(-frame["t_over_tau"]), rtol=1e-14, atol=0)
    assert np.all(frame["P2"] == 0.0)


def test_both_methods_write_suffixed_files(tmp_path):
    out = tmp_path / "cmp.csv"
    status = _run(MILD + ["--tmax", "1.5", "--points", "31", "--method", "both",
                          "--out", str(out), "--quiet"])
    assert status == ellipseqed.EXIT_OK
    paths = pd.read_csv(tmp_path / "cmp_pathsum.csv")
    laplace = pd.read_csv(tmp_path / "cmp_laplace.csv")
    assert np.max(np.abs(paths["P2"] - laplace["P2"])) < 1e-3
    sidecar = json.loads((tmp_path / "cmp.json").read_text(encoding="utf-8"))
    assert sidecar["run"]["diagnostics"]["max_discrepancy"]["max"] < 1e-3
    assert set(sidecar["series"]) == {"pathsum", "laplace"}


def test_disagreement_exits_with_accuracy_status(tmp_path, monkeypatch):
    monkeypatch.setitem(DEFAULTS, "agreement_tolerance", -1.0)
    out = tmp_path / "cmp.csv"
    status = _run(MILD + ["--tmax", "1", "--points", "11", "--method", "both",
                          "--out", str(out), "--quiet"])
    assert status == ellipseqed.EXIT_ACCURACY
    sidecar = json.loads((tmp_path / "cmp.json").read_text(encoding="utf-8"))
    assert sidecar["run"]["error_count"] == 1


def test_accuracy_error_exits_with_status_three(tmp_path, monkeypatch, capsys):
    def failing(*args, **kwargs):
        raise AccuracyError("doubling changed P by 1", estimates={"delta": 1.0})

    monkeypatch.setattr(ellipseqed, "simulate_laplace", failing)
    status = _run(MILD + ["--tmax", "1", "--points", "11", "--method", "laplace",
                          "--out", str(tmp_path / "x.csv"), "--quiet"])
    assert status == ellipseqed.EXIT_ACCURACY
    assert "Numerical accuracy failure" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["--eps", "1.5"],
    ["--kappa-eg", "0.2"],
    ["--preset", "fig9"],
    ["--tmax", "3", "--delay-cutoff", "2"],
    ["--init", "1,0"],
    ["--points", "many"],
])
def test_invalid_configuration_exits_with_status_two(argv, tmp_path, capsys):
    status = _run(argv + ["--out", str(tmp_path / "bad.csv"), "--quiet"])
    assert status == ellipseqed.EXIT_CONFIG
    assert "Invalid configuration" in capsys.readouterr().err
    assert not (tmp_path / "bad.csv").exists()


def test_config_file_is_overridden_by_flags(tmp_path):
    config = tmp_path / "cavity.cfg"
    config.write_text("eps = 0.5\nkappa = 20pi\ngamma_tau = 2\ntmax = 1\npoints = 51\n",
                      encoding="utf-8")
    out = tmp_path / "cfg.csv"
    status = _run(["--config", str(config), "--points", "11", "--out", str(out), "--quiet"])
    assert status == ellipseqed.EXIT_OK
    assert len(pd.read_csv(out)) == 11


def test_weights_mode_writes_table(tmp_path):
    out = tmp_path / "weights.csv"
    status = _run(["--mode", "weights", "--eps", "0.5", "--tmax", "3", "--out", str(out), "--quiet"])
    assert status == ellipseqed.EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["N1", "N2", "s_alpha", "weight_over_gamma", "delay_over_tau"]
    assert frame["delay_over_tau"].max() <= 3.0 + 1e-12
    row = frame[(frame["N1"] == 0.5) & (frame["N2"] == 1)].iloc[0]
    assert row["weight_over_gamma"] < 0.0


def test_sweep_writes_one_csv_per_value(tmp_path):
    out = tmp_path / "scan.csv"
    status = _run(MILD + ["--tmax", "1", "--points", "11", "--sweep", "eps=0.3:0.5:2",
                          "--out", str(out), "--quiet"])
    assert status == ellipseqed.EXIT_OK
    assert (tmp_path / "scan_eps000.csv").exists()
    assert (tmp_path / "scan_eps001.csv").exists()
    sidecar = json.loads((tmp_path / "scan.json").read_text(encoding="utf-8"))
    sweep = sidecar["run"]["diagnostics"]["sweep"]
    assert [entry["eps"] for entry in sweep] == pytest.approx([0.3, 0.5])


def test_repeated_runs_write_identical_csv(tmp_path):
    outputs = []
    for run in ("first", "second"):
        folder = tmp_path / run
        folder.mkdir()
        out = folder / "fig2c.csv"
        status = _run(["--preset", "fig2c", "--tmax", "1.5", "--points", "61",
                       "--out", str(out), "--quiet"])
        assert status == ellipseqed.EXIT_OK
        outputs.append(out)
    assert filecmp.cmp(outputs[0], outputs[1], shallow=False)


def test_quiet_run_prints_nothing(tmp_path, capsys):
    _run(MILD + ["--tmax", "1", "--points", "11", "--out", str(tmp_path / "q.csv"), "--quiet"])
    assert capsys.readouterr().out == ""


def test_default_stem_names_mode_and_preset():
    stem = ellipseqed.default_stem({"preset": "fig2b"}, "run")
    assert stem.startswith("ellipseqed_run_fig2b_")
    assert ellipseqed.default_stem({"preset": None}, "sweep").startswith("ellipseqed_sweep_custom_")


def test_scenario_from_flags_parses_pi_suffix():
    args = ellipseqed.build_parser().parse_args(["--kappa-eg", "20pi", "--isolated"])
    scenario = ellipseqed.scenario_from_args(args)
    assert scenario["kappa_eg"] == pytest.approx(20 * math.pi)
    assert scenario["isolated"] is True


if __name__ == "__main__":
    print("🧪 Testing the command-line entry point")
    print("=" * 50)
    failures = 0
    for name, test in list(globals().items()):
        if not name.startswith("test_") or not callable(test):
            continue
        if test.__code__.co_argcount or hasattr(test, "pytestmark"):
            print(f"   ⏭️ {name} (needs pytest fixtures)")
            continue
        try:
            test()
            print(f"   ✅ {name}")
        except Exception as e:
            failures += 1
            print(f"   ❌ {name}: {e}")
    sys.exit(1 if failures else 0)
