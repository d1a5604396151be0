"""Command-line entry point (`acl`)."""

import argparse
import sys
from typing import List, Optional

from loguru import logger

from app.commands import cmd_fixture, cmd_run, cmd_sweep_sigma, cmd_verify
from app.errors import AclError, ScenarioParseError
from app.models.results import RunReport
from app.services.fixtures import fixture_names
from app.utils.logger import setup_logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2


def _float_list(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected nonnegative sigma values, got {text!r}")
    return values


def _int_list(text: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"coordinates are 1-based, got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acl", description="Adaptive consensus with concurrent learning and quantized communication"
    )
    parser.add_argument("--log-level", default=None, help="Override ACL_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="Check preconditions and print the rate certificate")
    verify.add_argument("scenario", help="Scenario JSON file")

    run = sub.add_parser("run", help="Simulate one scenario and write CSV/SVG outputs")
    run.add_argument("scenario", help="Scenario JSON file")
    run.add_argument("--out", required=True, help="Output directory")
    run.add_argument("--force", action="store_true", help="Simulate even if preconditions fail")
    run.add_argument(
        "--coords", type=_int_list, default=None, help="State coordinates to plot (default: 1,3 where they exist)"
    )

    sweep = sub.add_parser("sweep", help="Run one simulation per quantization level")
    sweep.add_argument("scenario", help="Scenario JSON file")
    sweep.add_argument("--sigma", type=_float_list, default=[5.0, 10.0, 15.0], help="e.g. 5,10,15")
    sweep.add_argument("--out", required=True, help="Output directory")
    sweep.add_argument("--force", action="store_true", help="Sweep even if preconditions fail")

    fixture = sub.add_parser("fixture", help="Print a built-in scenario as JSON")
    fixture.add_argument("name", choices=fixture_names())
    return parser


def _emit(report: RunReport) -> int:
    print(report.model_dump_json(indent=2))
    if report.passed:
        logger.info(f"✓ {report.command} finished: all checks passed")
        return EXIT_OK
    failed = [name for name, ok in report.checks.items() if not ok]
    logger.error(f"✗ {report.command} failed: {', '.join(failed)}")
    return EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logger(args.log_level)

    try:
        if args.command == "fixture":
            print(cmd_fixture(args.name))
            return EXIT_OK
        if args.command == "verify":
            return _emit(cmd_verify(args.scenario))
        if args.command == "run":
            return _emit(cmd_run(args.scenario, args.out, force=args.force, coords=args.coords))
        if args.command == "sweep":
            return _emit(cmd_sweep_sigma(args.scenario, args.sigma, args.out, force=args.force))
    except ScenarioParseError as e:
        logger.error(str(e))
        return EXIT_PARSE
    except (AclError, ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED
    return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
