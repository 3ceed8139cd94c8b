"""Command line: ``stalab <suite> --config run.ini [--out DIR] [--strict-paper] [--seed N]``.

Exit codes: 0 every check passed, 1 a check failed (summary still written),
2 the configuration was rejected.
"""

import argparse
import logging
import sys
from pathlib import Path

from stalab import orchestrator
from stalab.utils.config import SUITE_PARAMS, build_config, load_run_config, load_settings
from stalab.utils.errors import ConfigError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stalab", description="Spacetime-algebra verification suites.")
    parser.add_argument("suite", choices=sorted(SUITE_PARAMS))
    parser.add_argument("--config", type=Path, help="INI run file; suite defaults when omitted")
    parser.add_argument("--out", type=Path, help="output directory (overrides the config)")
    parser.add_argument("--strict-paper", action="store_true", help="log-beta reading of the GHJE gradient term")
    parser.add_argument("--seed", type=int, help="random seed (overrides the config)")
    return parser


def _configure_logging(settings) -> None:
    kwargs = {"level": getattr(logging, settings.log_level, logging.WARNING), "format": LOG_FORMAT}
    if settings.log_file:
        kwargs["filename"] = settings.log_file
    logging.basicConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    _configure_logging(settings)
    try:
        config = load_run_config(args.config, args.suite) if args.config else build_config(args.suite)
    except ConfigError as exc:
        print(f"stalab: {exc}", file=sys.stderr)
        return orchestrator.EXIT_CONFIG

    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.strict_paper:
        overrides["strict_paper"] = True
    if overrides:
        config = config.model_copy(update=overrides)

    try:
        code, summary = orchestrator.run(config, settings)
    except ConfigError as exc:
        logger.error("configuration rejected: %s", exc)
        print(f"stalab: {exc}", file=sys.stderr)
        return orchestrator.EXIT_CONFIG
    status = "passed" if summary["passed"] else "FAILED"
    print(f"{config.suite}: {status} ({len(summary['checks'])} checks)")
    return code


if __name__ == "__main__":
    sys.exit(main())
