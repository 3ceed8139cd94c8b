"""Suite registry and the run pipeline shared by the command line and the tests."""

import logging
from pathlib import Path
from typing import Callable

from stalab import sta_core as sc
from stalab.suites import SuiteResult
from stalab.suites import (
    algebra_suite,
    decompose_suite,
    equivalence_suite,
    ghje_suite,
    soliton_suite,
    worldline_suite,
)
from stalab.utils.config import RunConfig, Settings, load_settings
from stalab.utils.errors import NumericalError
from stalab.utils.summary import write_summary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

SuiteRunner = Callable[[RunConfig, Path, Settings], SuiteResult]


class SuiteStore:
    def __init__(self):
        self.suites: dict[str, SuiteRunner] = {}

    def register(self, name: str, runner: SuiteRunner) -> None:
        self.suites[name] = runner

    def get(self, name: str) -> SuiteRunner | None:
        return self.suites.get(name)

    def names(self) -> list[str]:
        return sorted(self.suites)


store = SuiteStore()
store.register("algebra", algebra_suite.run)
store.register("decompose", decompose_suite.run)
store.register("equivalence", equivalence_suite.run)
store.register("ghje", ghje_suite.run)
store.register("soliton", soliton_suite.run)
store.register("worldline", worldline_suite.run)


def output_dir(config: RunConfig, settings: Settings) -> Path:
    return Path(config.out_dir) if config.out_dir is not None else settings.out_dir / config.suite


def build_summary(config: RunConfig, result: SuiteResult, error: str | None = None) -> dict:
    passed = error is None and result.passed
    summary = {
        "suite": config.suite,
        "passed": passed,
        "exit_code": EXIT_OK if passed else EXIT_FAILED,
        "seed": config.seed,
        "strict_paper": config.strict_paper,
        "parameters": config.parameters(),
        "checks": {name: check.as_dict() for name, check in result.checks.items()},
        "diagnostics": result.diagnostics,
        "conventions_sha256": sc.convention_hash(),
        "artifacts": sorted(result.artifacts),
    }
    if error is not None:
        summary["error"] = error
    return summary


def run(config: RunConfig, settings: Settings | None = None) -> tuple[int, dict]:
    """Run one suite and always write ``summary.json``.

    ConfigError propagates to the caller; numerical precondition failures are
    recorded in the summary as a failed run.
    """
    settings = settings or load_settings()
    runner = store.get(config.suite)
    out_dir = output_dir(config, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info("running suite %s (seed %d) into %s", config.suite, config.seed, out_dir)

    error = None
    try:
        result = runner(config, out_dir, settings)
    except NumericalError as exc:
        logger.error("suite %s stopped: %s", config.suite, exc)
        result = SuiteResult()
        error = f"{type(exc).__name__}: {exc}"

    summary = build_summary(config, result, error)
    write_summary(out_dir, summary)
    if summary["passed"]:
        logger.info("suite %s passed %d checks", config.suite, len(result.checks))
    else:
        logger.info("suite %s failed: %s", config.suite, result.failed() or error)
    return summary["exit_code"], summary
