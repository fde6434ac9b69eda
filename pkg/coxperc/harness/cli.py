import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from coxperc.common.replicates import ReplicatePool
from coxperc.exceptions import CoxpercError
from coxperc.harness.catalog import list_presets, resolve
from coxperc.harness.config import parse_config
from coxperc.harness.exceptions import HarnessError
from coxperc.harness.experiments import run_experiment
from coxperc.harness.output import write_outputs
from coxperc.settings import Settings, get_settings
from coxperc.version import VERSION

__all__ = ("main", "build_parser", "EXIT_OK", "EXIT_CONFIG", "EXIT_RUNTIME")

_logger = logging.getLogger("coxperc.harness")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coxperc",
        description="Percolation experiments for Cox Boolean models.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {VERSION}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a config file or a preset")
    run.add_argument("config", help="path to a TOML config or preset name")
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", type=Path, default=None)
    run.add_argument(
        "--log-level",
        choices=[level.value for level in Settings.LogLevel],
        default=None,
    )

    commands.add_parser("presets", help="list the bundled presets")
    return parser


def _configure_logging(level: str):
    logging.basicConfig(
        level=level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _run(args: argparse.Namespace) -> int:
    settings = get_settings()
    config, stem = resolve(args.config)
    if args.seed is not None:
        config = parse_config({**config.echo(), "seed": args.seed})
    threads = args.threads or settings.threads
    directory = args.out or config.output.directory or settings.output_dir
    stem = config.output.stem or stem

    started = time.perf_counter()
    report = run_experiment(config, ReplicatePool(threads))
    elapsed = time.perf_counter() - started
    write_outputs(report, config, directory, stem, elapsed, threads)
    _logger.info("%s finished in %.1fs", config.kind, elapsed)
    return EXIT_OK


def _presets() -> int:
    presets = list_presets()
    width = max(map(len, presets), default=0)
    for name, description in presets.items():
        sys.stdout.write(f"{name.ljust(width)}  {description}\n")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = getattr(args, "log_level", None) or get_settings().log_level
    _configure_logging(getattr(level, "value", level))

    if args.command == "presets":
        return _presets()
    try:
        return _run(args)
    except HarnessError as e:
        _logger.error("%s", e.description)
        sys.stderr.write(f"error: {e.description}\n")
        return EXIT_CONFIG
    except CoxpercError as e:
        _logger.error("run failed: %s", e.to_dict())
        sys.stderr.write(f"error: {e.description or e.error_code}\n")
        return EXIT_RUNTIME
    except (ValidationError, ValueError, ArithmeticError) as e:
        _logger.exception("run failed")
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
