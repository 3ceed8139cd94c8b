"""Process settings from the environment and run configuration from INI files.

A run file has a ``[run]`` section (suite, seed, output directory, strict
flag) and at most one further section named after the suite holding its
parameters. Anything else is rejected.
"""

import configparser
import logging
import os
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from stalab.utils.errors import ConfigError

logger = logging.getLogger(__name__)

load_dotenv()

SuiteName = Literal["algebra", "decompose", "equivalence", "ghje", "soliton", "worldline"]
Vector4 = tuple[float, float, float, float]


def _split_floats(value):
    if isinstance(value, str):
        return tuple(float(v) for v in value.split(",") if v.strip())
    return value


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    log_level: str = "WARNING"
    log_file: str | None = None
    out_dir: Path = Path("runs")
    eps_scale: float = Field(default=1e-10, gt=0.0)


def load_settings() -> Settings:
    return Settings(
        log_level=os.getenv("STALAB_LOG_LEVEL", "WARNING").upper(),
        log_file=os.getenv("STALAB_LOG_FILE") or None,
        out_dir=Path(os.getenv("STALAB_OUT_DIR", "runs")),
        eps_scale=float(os.getenv("STALAB_EPS_SCALE", "1e-10")),
    )


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class AlgebraParams(_Section):
    samples: int = Field(default=1000, gt=0)
    tolerance: float = Field(default=1e-12, gt=0.0)
    max_rapidity: float = Field(default=2.0, gt=0.0)
    mass_range: tuple[float, float] = (0.5, 3.0)

    @field_validator("mass_range", mode="before")
    @classmethod
    def _split(cls, value):
        return _split_floats(value)


class DecomposeParams(_Section):
    multivector: str = "1"
    tolerance: float = Field(default=1e-12, gt=0.0)


class EquivalenceParams(_Section):
    pi: Vector4 = (1.0, 0.0, 0.0, 0.0)
    a_pot: Vector4 = (0.0, 0.0, 0.0, 0.0)
    mass: float = Field(default=1.0, gt=0.0)
    charge: float = 0.0
    action_phase: float = 0.0
    direction: Literal["hje_to_dirac", "dirac_to_hje", "both"] = "both"
    h: float = Field(default=0.05, gt=0.0)
    mass_perturbation: float = 0.0
    tolerance: float = Field(default=1e-10, gt=0.0)
    recovery_tolerance: float = Field(default=1e-6, gt=0.0)

    @field_validator("pi", "a_pot", mode="before")
    @classmethod
    def _split(cls, value):
        return _split_floats(value)


class GhjeParams(_Section):
    family: Literal["classical", "modulated"] = "modulated"
    mass: float = Field(default=1.0, gt=0.0)
    charge: float = 0.0
    pi: Vector4 = (1.0, 0.0, 0.0, 0.0)
    a_pot: Vector4 = (0.0, 0.0, 0.0, 0.0)
    rho0: float = Field(default=1.0, gt=0.0)
    width: float | None = Field(default=1.5, gt=0.0)
    beta0: float = 0.3
    beta_slope: Vector4 = (0.1, 0.05, -0.02, 0.03)
    mode: Literal["linear", "log", "exact"] = "linear"
    center: Vector4 = (0.0, 0.0, 0.0, 0.0)
    half_extent: float = Field(default=0.2, gt=0.0)
    h: float = Field(default=0.1, gt=0.0)
    tolerance: float = Field(default=1e-10, gt=0.0)
    decomposition_tolerance: float = Field(default=1e-9, gt=0.0)

    @field_validator("pi", "a_pot", "beta_slope", "center", mode="before")
    @classmethod
    def _split(cls, value):
        return _split_floats(value)

    @field_validator("width", mode="before")
    @classmethod
    def _no_width(cls, value):
        # an empty value or "none" keeps the density constant
        if isinstance(value, str) and value.strip().lower() in ("", "none"):
            return None
        return value


class SolitonRunParams(_Section):
    amplitude: float = 1.0
    mass: float = Field(default=1.0, gt=0.0)
    speeds: tuple[float, ...] = (0.0, 0.6)
    phase: Literal["sin", "cos"] = "sin"
    broken_dispersion: bool = False
    dispersion_factor: float = 2.0
    center: Vector4 = (0.35, 0.3, -0.25, 0.4)
    extent: float = Field(default=0.2, gt=0.0)
    h: float = Field(default=0.02, gt=0.0)
    order: int = 2
    ratio_tolerance: float = Field(default=0.2, gt=0.0)
    dispersion_tolerance: float = Field(default=1e-12, gt=0.0)
    rest_frame_tolerance: float = Field(default=1e-10, gt=0.0)

    @field_validator("speeds", "center", mode="before")
    @classmethod
    def _split(cls, value):
        return _split_floats(value)

    @field_validator("order")
    @classmethod
    def _known_order(cls, value):
        if value not in (2, 4):
            raise ValueError("stencil order must be 2 or 4")
        return value


class WorldlineParams(_Section):
    scenario: Literal["free", "cyclotron", "hyperbolic"] = "cyclotron"
    mass: float = Field(default=1.0, gt=0.0)
    charge: float = 1.0
    strength: float = 1.0
    rapidity: float = 0.5
    steps: int = Field(default=10000, gt=0)
    dtau: float | None = Field(default=None, gt=0.0)
    spin_k: float = 0.5
    kappa2: float = -2.0
    plane_wave_velocity: Vector4 = (1.0, 0.0, 0.0, 0.0)
    norm_tolerance: float = Field(default=1e-9, gt=0.0)
    oracle_tolerance: float = Field(default=1e-6, gt=0.0)
    frame_tolerance: float = Field(default=1e-7, gt=0.0)
    closed_form_tolerance: float = Field(default=1e-8, gt=0.0)
    plane_wave_tolerance: float = Field(default=1e-10, gt=0.0)

    @field_validator("plane_wave_velocity", mode="before")
    @classmethod
    def _split(cls, value):
        return _split_floats(value)


SUITE_PARAMS: dict[str, type[_Section]] = {
    "algebra": AlgebraParams,
    "decompose": DecomposeParams,
    "equivalence": EquivalenceParams,
    "ghje": GhjeParams,
    "soliton": SolitonRunParams,
    "worldline": WorldlineParams,
}


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    suite: SuiteName
    seed: int = 0
    out_dir: Path | None = None
    strict_paper: bool = False
    params: AlgebraParams | DecomposeParams | EquivalenceParams | GhjeParams | SolitonRunParams | WorldlineParams

    def parameters(self) -> dict:
        return self.params.model_dump(mode="json")


def build_config(suite: str, run: dict | None = None, params: dict | None = None) -> RunConfig:
    """Validate a run from plain dictionaries; raises ConfigError."""
    if suite not in SUITE_PARAMS:
        raise ConfigError(f"unknown suite {suite!r}, expected one of {sorted(SUITE_PARAMS)}")
    run = dict(run or {})
    run.pop("suite", None)
    try:
        section = SUITE_PARAMS[suite](**(params or {}))
        return RunConfig(suite=suite, params=section, **run)
    except ValidationError as exc:
        logger.error("invalid %s configuration: %s", suite, exc)
        raise ConfigError(str(exc)) from exc


def load_run_config(path, suite: str | None = None) -> RunConfig:
    """Read an INI run file; ``suite`` (from the command line) must agree with ``[run] suite``."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        read = parser.read(Path(path), encoding="utf-8")
    except configparser.Error as exc:
        logger.error("cannot parse %s: %s", path, exc)
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not read:
        logger.error("config file %s not found", path)
        raise ConfigError(f"config file {path} not found")

    run = dict(parser["run"]) if parser.has_section("run") else {}
    file_suite = run.get("suite")
    if suite is None:
        suite = file_suite
    elif file_suite is not None and file_suite != suite:
        raise ConfigError(f"config {path} is for suite {file_suite!r}, not {suite!r}")
    if suite is None:
        raise ConfigError(f"no suite named in {path}")

    extra = [s for s in parser.sections() if s not in ("run", suite)]
    if extra:
        logger.error("unknown sections in %s: %s", path, extra)
        raise ConfigError(f"unknown sections {extra} in {path}")
    params = dict(parser[suite]) if parser.has_section(suite) else {}
    return build_config(suite, run, params)
