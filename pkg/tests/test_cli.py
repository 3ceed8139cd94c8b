import json
from pathlib import Path

import pandas as pd
import pytest

from stalab import cli, orchestrator
from stalab.utils.config import build_config

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(autouse=True)
def _isolated_output(monkeypatch, tmp_path):
    monkeypatch.setenv("STALAB_OUT_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("STALAB_LOG_LEVEL", "WARNING")


def _summary(out: Path) -> dict:
    return json.loads((out / "summary.json").read_text(encoding="utf-8"))


def _ini(tmp_path, text: str) -> Path:
    path = tmp_path / "run.ini"
    path.write_text(text, encoding="utf-8")
    return path


def test_registered_suites():
    assert orchestrator.store.names() == ["algebra", "decompose", "equivalence", "ghje", "soliton", "worldline"]


def test_decompose_run(tmp_path, capsys):
    out = tmp_path / "decompose"
    code = cli.main(["decompose", "--config", str(CONFIG_DIR / "decompose.ini"), "--out", str(out)])
    assert code == 0
    assert "decompose: passed" in capsys.readouterr().out
    summary = _summary(out)
    assert summary["passed"] and summary["exit_code"] == 0
    assert summary["checks"]["recomposition"]["passed"]
    assert summary["diagnostics"]["rho"] > 0.0
    assert len(summary["conventions_sha256"]) == 64


def test_runs_are_byte_identical(tmp_path):
    ini = _ini(tmp_path, "[run]\nsuite = algebra\nseed = 11\n\n[algebra]\nsamples = 20\n")
    first, second = tmp_path / "a", tmp_path / "b"
    assert cli.main(["algebra", "--config", str(ini), "--out", str(first)]) == 0
    assert cli.main(["algebra", "--config", str(ini), "--out", str(second)]) == 0
    assert (first / "summary.json").read_bytes() == (second / "summary.json").read_bytes()
    assert _summary(first)["seed"] == 11


def test_seed_flag_overrides_the_file(tmp_path):
    out = tmp_path / "seeded"
    ini = _ini(tmp_path, "[run]\nsuite = algebra\nseed = 11\n\n[algebra]\nsamples = 5\n")
    assert cli.main(["algebra", "--config", str(ini), "--out", str(out), "--seed", "3"]) == 0
    assert _summary(out)["seed"] == 3


def test_default_run_goes_to_the_settings_directory(tmp_path):
    assert cli.main(["decompose"]) == 0
    assert _summary(tmp_path / "runs" / "decompose")["diagnostics"]["classical"] is True


def test_equivalence_runs(tmp_path):
    out = tmp_path / "eq"
    assert cli.main(["equivalence", "--config", str(CONFIG_DIR / "equivalence.ini"), "--out", str(out)]) == 0
    summary = _summary(out)
    assert summary["checks"]["hje_residual"]["value"] <= 1e-10
    assert summary["checks"]["dh_residual"]["value"] <= 1e-10
    assert "equivalence_events.csv" in summary["artifacts"]

    out = tmp_path / "perturbed"
    assert cli.main(["equivalence", "--config", str(CONFIG_DIR / "equivalence_perturbed.ini"), "--out", str(out)]) == 0
    summary = _summary(out)
    assert summary["checks"]["mass_perturbation_residual"]["passed"]
    assert summary["diagnostics"]["perturbed_dh_residual_max"] > 1e-3


def test_broken_soliton_fails_with_a_summary(tmp_path):
    ini = _ini(
        tmp_path,
        "[run]\nsuite = soliton\n\n[soliton]\nspeeds = 0.6\nbroken_dispersion = true\nextent = 0.16\nh = 0.04\n",
    )
    out = tmp_path / "broken"
    assert cli.main(["soliton", "--config", str(ini), "--out", str(out)]) == 1
    summary = _summary(out)
    assert not summary["passed"] and summary["exit_code"] == 1
    assert not summary["checks"]["v0.6_wave_convergence"]["passed"]
    frame = pd.read_csv(out / "soliton_convergence.csv")
    assert set(frame["residual"]) == {"wave", "dirac"}


def test_genuine_soliton_passes(tmp_path):
    ini = _ini(tmp_path, "[run]\nsuite = soliton\n\n[soliton]\nspeeds = 0.0, 0.6\nextent = 0.16\nh = 0.04\n")
    out = tmp_path / "soliton"
    assert cli.main(["soliton", "--config", str(ini), "--out", str(out)]) == 0
    assert _summary(out)["checks"]["rest_frame_g01"]["passed"]


def test_strict_paper_switches_the_ghje_reading(tmp_path):
    out = tmp_path / "ghje"
    assert cli.main(["ghje", "--config", str(CONFIG_DIR / "ghje.ini"), "--out", str(out), "--strict-paper"]) == 0
    summary = _summary(out)
    assert summary["strict_paper"] is True
    assert summary["diagnostics"]["mode"] == "log"
    assert summary["diagnostics"]["masked"] == 0
    assert (out / "ghje_report.csv").exists()


def test_ghje_with_constant_density(tmp_path):
    ini = _ini(tmp_path, "[run]\nsuite = ghje\n\n[ghje]\nwidth = none\nhalf_extent = 0.1\n")
    out = tmp_path / "flat"
    assert cli.main(["ghje", "--config", str(ini), "--out", str(out)]) == 0
    summary = _summary(out)
    assert summary["parameters"]["width"] is None
    frame = pd.read_csv(out / "ghje_report.csv")
    assert len(frame) == 81


def test_worldline_run(tmp_path):
    ini = _ini(tmp_path, "[run]\nsuite = worldline\n\n[worldline]\nscenario = cyclotron\nsteps = 2000\n")
    out = tmp_path / "worldline"
    assert cli.main(["worldline", "--config", str(ini), "--out", str(out)]) == 0
    summary = _summary(out)
    assert summary["checks"]["cyclotron_period"]["value"] <= 1e-6
    assert summary["diagnostics"]["frenet_chain_complete"] is True
    frame = pd.read_csv(out / "trajectory.csv")
    assert len(frame) == 2001


@pytest.mark.parametrize(
    "text",
    [
        "[run]\nsuite = decompose\n\n[decompose]\nmultivektor = 1\n",
        "[run]\nsuite = decompose\n\n[extras]\nkey = 1\n",
        "[run]\nsuite = decompose\n\n[decompose]\nmultivector = 1 + + g0\n",
        "[run]\nsuite = worldline\n\n[worldline]\nscenario = cyclotron\nrapidity = 0\n",
    ],
)
def test_rejected_configuration_exits_2(tmp_path, text):
    out = tmp_path / "rejected"
    assert cli.main(["decompose" if "decompose" in text else "worldline", "--config", str(_ini(tmp_path, text)),
                     "--out", str(out)]) == 2
    assert not (out / "summary.json").exists()


def test_numerical_failure_is_recorded(tmp_path):
    out = tmp_path / "singular"
    config = build_config("decompose", {"out_dir": out}, {"multivector": "g01 + g12"})
    code, summary = orchestrator.run(config)
    assert code == 1
    assert summary["error"].startswith("SingularSpinor")
    assert _summary(out)["error"] == summary["error"]
