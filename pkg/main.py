#!/usr/bin/env python3
"""
vertical-squash - command-line entry point

Samples surfaces, reconstructs them from point clouds by vertical collapses
of the alpha-complex, verifies sampling conditions and tabulates the
feasible parameter regions.

Usage:
    python main.py sample --surface "sphere r=1" --eps 0.2 --seed 7 -o s.xyz
    python main.py reconstruct --mode naive --alpha-ratio 0.359 -i s.xyz --surface "sphere r=1" -o s.off
    python main.py verify -i s.xyz --mesh s.off --surface "sphere r=1" --alpha-ratio 0.359
    python main.py region --mode both --grid 400 -o region.csv
    python main.py schema
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from pydantic import ValidationError

from src import __version__
from src.cli_io.reports import RunConfig, RunReport, report_schema
from src.commands import EXIT_INTERNAL, EXIT_IO, run_command
from src.config.settings import ConfigurationError, setup_logging
from src.errors import CacheError, FormatError, SquashError, SurfaceParseError

logger = logging.getLogger(__name__)

IO_ERRORS = (FormatError, SurfaceParseError, CacheError, ConfigurationError, ValidationError, OSError)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-o", "--output",
        type=str,
        default=None,
        help="Main output file (default: under the configured output directory)"
    )
    parser.add_argument(
        "--report",
        dest="report_path",
        type=str,
        default=None,
        help="JSON report path (default: output path with .json suffix)"
    )
    parser.add_argument(
        "--set",
        dest="tolerances",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a setting for this run, e.g. --set genericity_tol=1e-8"
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable debug logging"
    )
    parser.add_argument(
        "-q", "--quiet",
        action="store_true",
        help="Suppress the summary printout"
    )
    parser.add_argument(
        "--log-level",
        type=str,
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: from settings)"
    )
    parser.add_argument(
        "--log-file",
        type=str,
        default=None,
        help="Log file path (default: stderr only)"
    )


def _add_lengths(parser: argparse.ArgumentParser) -> None:
    """Lengths can be absolute or ratios of the reach; both forms are accepted."""
    for name, label in (("eps", "epsilon"), ("delta", "delta"), ("alpha", "alpha")):
        parser.add_argument(f"--{name}", dest=label, type=float, default=None, help=f"Absolute {label}")
        parser.add_argument(
            f"--{name}-ratio",
            dest=f"{label}_ratio",
            type=float,
            default=None,
            help=f"{label} as a ratio of the surface's reach R"
        )


def create_parser() -> argparse.ArgumentParser:
    """
    Create and configure argument parser.

    Returns:
        Configured ArgumentParser instance
    """
    parser = argparse.ArgumentParser(
        prog="squash",
        description="vertical-squash - surface reconstruction by vertical collapses",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0  success
  1  input, parse or configuration error
  2  hypothesis gates failed (artifacts and report are still written)
  3  internal error
        """
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample", help="Sample a surface")
    sample.add_argument("--surface", type=str, required=True, help='Surface, e.g. "sphere r=1"')
    _add_lengths(sample)
    sample.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    sample.add_argument("--no-verify", dest="verify", action="store_false", help="Skip the sample check")
    _add_common(sample)

    rec = sub.add_parser("reconstruct", help="Reconstruct a mesh from a cloud")
    rec.add_argument("-i", "--input", type=str, required=True, help="Point cloud (.xyz, .ply, .off)")
    rec.add_argument(
        "--mode",
        type=str,
        default="naive",
        choices=["naive", "practical", "noncrossing", "restricted"],
        help="Algorithm (default: naive)"
    )
    rec.add_argument(
        "--surface",
        type=str,
        default=None,
        help="Surface; optional for --mode practical, where it is only used for verification"
    )
    _add_lengths(rec)
    rec.add_argument("--seed", type=int, default=0, help="Seed recorded in the report")
    rec.add_argument("--trace", dest="trace_path", type=str, default=None, help="Trace path (JSON lines)")
    rec.add_argument("--dump-dual", type=str, default=None, help="Write the initial dual graph as DOT")
    rec.add_argument("--snapshot-every", type=int, default=0, help="Write the mesh every N collapses")
    rec.add_argument("--cache", type=str, default=None, help="Alpha-complex cache (.npz), read or written")
    rec.add_argument("--no-verify", dest="verify", action="store_false", help="Skip post-hoc verification")
    _add_common(rec)

    ver = sub.add_parser("verify", help="Check sampling conditions and certify a mesh")
    ver.add_argument("--surface", type=str, required=True, help="Reference surface")
    ver.add_argument("-i", "--input", type=str, default=None, help="Point cloud")
    ver.add_argument("--mesh", type=str, default=None, help="Mesh to certify (.off, .ply)")
    ver.add_argument(
        "--mode",
        type=str,
        default="naive",
        choices=["naive", "practical"],
        help="Which hypotheses decide the exit code (default: naive)"
    )
    _add_lengths(ver)
    _add_common(ver)

    reg = sub.add_parser("region", help="Tabulate the feasible (eps/R, alpha/R) regions")
    reg.add_argument(
        "--mode",
        dest="region_mode",
        type=str,
        default="both",
        choices=["naive", "practical", "both"],
        help="Which region to log (both columns are always written)"
    )
    reg.add_argument("--grid", type=int, default=400, help="Lattice resolution per axis (default: 400)")
    _add_common(reg)

    sub.add_parser("schema", help="Print the JSON schema of run reports")
    return parser


def _parse_overrides(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigurationError(f"--set {key}: {value!r} is not a number")
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into a validated ``RunConfig``."""
    skip = {"verbose", "quiet", "log_level", "log_file", "tolerances"}
    values: dict[str, Any] = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    values["tolerances"] = _parse_overrides(args.tolerances)
    return RunConfig(**values)


def print_summary(report: RunReport) -> None:
    print(f"\n{'=' * 60}")
    print(f"SQUASH {report.config.command.upper()} - exit code {report.exit_code}")
    print(f"{'=' * 60}")
    if report.certificate is not None:
        cert = report.certificate
        status = "[OK]" if cert.matches else "[!!]"
        print(f"{status} {cert.expected}: chi={cert.euler_characteristic}, components={cert.num_components}")
        for reason in cert.reasons:
            print(f"    - {reason}")
    if report.gates_passed is not None:
        print(f"Hypothesis gates: {'passed' if report.gates_passed else 'FAILED'}")
    if report.trace is not None:
        print(f"Collapses: {report.trace.steps} (from above {report.trace.from_above}, "
              f"from below {report.trace.from_below})")
    for name, path in sorted(report.outputs.items()):
        print(f"  {name}: {path}")
    total = sum(report.timing.values())
    if total:
        print(f"\nExecution time: {total:.1f} seconds")


def main(argv: Optional[list[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        Exit code
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.command == "schema":
        print(json.dumps(report_schema(), indent=2, sort_keys=True))
        return 0

    setup_logging(level="DEBUG" if args.verbose else args.log_level, log_file=args.log_file)
    logger.debug(f"Arguments: {args}")

    try:
        config = build_config(args)
        report = run_command(config)
    except IO_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"\nERROR: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_IO
    except SquashError as e:
        logger.exception("Run failed")
        print(f"\nERROR: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, AssertionError) as e:
        logger.exception("Contract violation")
        print(f"\nERROR: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return EXIT_INTERNAL

    if not args.quiet:
        print_summary(report)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
