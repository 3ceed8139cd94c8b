import json
import math
from pathlib import Path

import numpy as np
import pytest

from stalab.utils import config as cfg
from stalab.utils.errors import ConfigError
from stalab.utils.summary import canonical_json, write_summary

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _ini(tmp_path, text: str) -> Path:
    path = tmp_path / "run.ini"
    path.write_text(text, encoding="utf-8")
    return path


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.ini")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    config = cfg.load_run_config(path)
    assert isinstance(config.params, cfg.SUITE_PARAMS[config.suite])


def test_ini_values_are_parsed(tmp_path):
    path = _ini(tmp_path, "[run]\nsuite = equivalence\nseed = 4\n\n[equivalence]\npi = 1.25, 0, 0, -0.75\nmass = 1\n")
    config = cfg.load_run_config(path, "equivalence")
    assert config.seed == 4
    assert config.params.pi == (1.25, 0.0, 0.0, -0.75)
    assert config.parameters()["pi"] == [1.25, 0.0, 0.0, -0.75]


@pytest.mark.parametrize("width", ["", "none", "None"])
def test_ghje_width_can_be_left_out(tmp_path, width):
    path = _ini(tmp_path, f"[run]\nsuite = ghje\n\n[ghje]\nwidth = {width}\n")
    assert cfg.load_run_config(path).params.width is None
    path = _ini(tmp_path, "[run]\nsuite = ghje\n\n[ghje]\nwidth = 0.8\n")
    assert cfg.load_run_config(path).params.width == 0.8


def test_defaults_without_a_suite_section(tmp_path):
    config = cfg.load_run_config(_ini(tmp_path, "[run]\nsuite = worldline\n"))
    assert config.params == cfg.WorldlineParams()
    assert config.strict_paper is False


@pytest.mark.parametrize(
    "text",
    [
        "[run]\nsuite = decompose\n\n[decompose]\nmultivektor = 1\n",
        "[run]\nsuite = decompose\n\n[soliton]\nh = 0.1\n",
        "[run]\nsuite = decompose\ncolour = red\n",
        "[run]\nsuite = teleport\n",
        "[run]\nsuite = soliton\n\n[soliton]\norder = 3\n",
        "[run]\nsuite = soliton\n\n[soliton]\nh = -0.1\n",
        "[decompose]\nmultivector = 1\n",
        "not an ini file",
    ],
)
def test_bad_run_files_are_rejected(tmp_path, text):
    with pytest.raises(ConfigError):
        cfg.load_run_config(_ini(tmp_path, text))


def test_suite_must_match_the_file(tmp_path):
    with pytest.raises(ConfigError):
        cfg.load_run_config(_ini(tmp_path, "[run]\nsuite = ghje\n"), "soliton")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        cfg.load_run_config(tmp_path / "absent.ini")


def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("STALAB_LOG_LEVEL", "debug")
    monkeypatch.setenv("STALAB_OUT_DIR", str(tmp_path))
    monkeypatch.setenv("STALAB_EPS_SCALE", "1e-8")
    monkeypatch.delenv("STALAB_LOG_FILE", raising=False)
    settings = cfg.load_settings()
    assert settings.log_level == "DEBUG"
    assert settings.out_dir == tmp_path
    assert settings.eps_scale == 1e-8
    assert settings.log_file is None


def test_canonical_json_is_stable():
    summary = {"b": np.float64(1.5), "a": [np.int64(2), math.nan, -math.inf], "c": np.bool_(True), "d": Path("x/y")}
    text = canonical_json(summary)
    assert text.endswith("\n")
    assert json.loads(text) == {"a": [2, "nan", "-inf"], "b": 1.5, "c": True, "d": "x/y"}
    assert text.index('"a"') < text.index('"b"')
    assert canonical_json(dict(reversed(list(summary.items())))) == text


def test_summary_file_is_replaced(tmp_path):
    write_summary(tmp_path, {"passed": False})
    path = write_summary(tmp_path, {"passed": True})
    assert json.loads(path.read_text()) == {"passed": True}
    assert [p.name for p in tmp_path.iterdir()] == ["summary.json"]
