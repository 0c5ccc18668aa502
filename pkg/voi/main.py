"""
voi - command-line value-of-information analysis

    python main.py analyze problems/turtle.json --measurement d3
    python main.py compare problems/turtle.json --deltas 0,0.05
    python main.py sweep problems/frog.json --grid 0:20:5
    python main.py validate problems/frog.json --canonical
"""

import argparse
import logging
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional, Sequence, Tuple

from config_utils import configure_logging, parse_deltas, settings, settings_error
from errors import EXIT_OK, UsageError, VoiError
from schemas import MeasurementModel

# Import services
from services import (
    create_bayes_service,
    create_design_service,
    create_model_service,
    create_problem_file_service,
    create_report_service,
    create_voi_service,
)
from services.problem_file_service import ParsedProblem

logger = logging.getLogger("voi")

# Guard against grids that would print millions of lines
MAX_GRID_POINTS = 100_000

# Initialize services
model_service = create_model_service()
bayes_service = create_bayes_service()
voi_service = create_voi_service(bayes_service, model_service, settings.default_deltas)
design_service = create_design_service(voi_service, settings.max_workers)
problem_file_service = create_problem_file_service(model_service)
report_service = create_report_service(settings.table_decimals)


class VoiArgumentParser(argparse.ArgumentParser):
    """Usage mistakes exit with status 1; 2 is reserved for unparseable problem files."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# Helper Functions

def parse_grid(grid: str) -> Tuple[float, ...]:
    """
    'start:stop:step' -> (start, start + step, ..., <= stop)

    Points are generated in decimal arithmetic so 0:0.07:0.01 hits 0.05 exactly.

    Raises:
        UsageError: If the grid is malformed or the range is empty or negative
    """
    parts = grid.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid must look like start:stop:step, got '{grid}'")
    try:
        start, stop, step = (Decimal(p.strip()) for p in parts)
    except InvalidOperation:
        raise UsageError(f"--grid '{grid}': start, stop and step must be numbers")

    if not all(v.is_finite() for v in (start, stop, step)):
        raise UsageError(f"--grid '{grid}': values must be finite")
    if start < 0 or stop < start:
        raise UsageError(f"--grid '{grid}': need 0 <= start <= stop")
    if step <= 0:
        raise UsageError(f"--grid '{grid}': step must be > 0")

    count = int((stop - start) / step) + 1
    if count > MAX_GRID_POINTS:
        raise UsageError(f"--grid '{grid}' has {count} points; the limit is {MAX_GRID_POINTS}")

    return tuple(float(start + k * step) for k in range(count))


def resolve_deltas(raw: Optional[str], parsed: ParsedProblem) -> Optional[Tuple[float, ...]]:
    """--deltas beats the file's deltas; None falls through to VOI_DEFAULT_DELTAS."""
    if raw is not None:
        try:
            return parse_deltas(raw)
        except ValueError as e:
            raise UsageError(str(e))
    return parsed.deltas


def select_measurement(parsed: ParsedProblem, name: Optional[str]) -> MeasurementModel:
    """
    Named measurement, or the only one in the file when no name is given.

    Raises:
        UsageError: Unknown name, or several candidates and no name
    """
    available = [m.name for m in parsed.measurements]
    if name is None:
        if len(parsed.measurements) == 1:
            return parsed.measurements[0]
        if not parsed.measurements:
            raise UsageError(f"Problem '{parsed.problem.name}' has no measurements (try --perfect)")
        raise UsageError(f"Choose one with --measurement: {', '.join(available)}")

    for measurement in parsed.measurements:
        if measurement.name == name:
            return measurement
    raise UsageError(f"Unknown measurement '{name}'; available: {', '.join(available) or 'none'}")


def write_output(text: str, output: Optional[str]) -> None:
    """Write to --output, or stdout when not given."""
    if output is None:
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text, encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Cannot write {output}: {e.strerror or e}")
    logger.info("✅ Wrote %s", output)


# Commands

def cmd_analyze(args: argparse.Namespace) -> int:
    parsed = problem_file_service.read_problem_file(args.file)
    deltas = resolve_deltas(args.deltas, parsed)

    if args.perfect:
        measurement = model_service.perfect_measurement(parsed.problem)
    else:
        measurement = select_measurement(parsed, args.measurement)

    report = voi_service.analyze(parsed.problem, measurement, deltas)

    if args.format == "csv":
        write_output(report_service.analyze_csv(report), args.output)
        return EXIT_OK

    posteriors = shifts = None
    if args.posteriors:
        posteriors = bayes_service.posterior_table(parsed.problem, measurement)
        shifts = bayes_service.belief_shifts(parsed.problem, posteriors)

    write_output(
        report_service.analyze_table(report, posteriors=posteriors, shifts=shifts, explain=args.explain),
        args.output,
    )
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    parsed = problem_file_service.read_problem_file(args.file)
    deltas = resolve_deltas(args.deltas, parsed)

    if not parsed.measurements:
        raise UsageError(f"Problem '{parsed.problem.name}' has no measurements to compare")

    comparison = design_service.compare_designs(parsed.problem, parsed.measurements, deltas)
    logger.info("🏆 Best design: %s", comparison.best_design)

    if args.format == "csv":
        write_output(report_service.comparison_csv(comparison), args.output)
        return EXIT_OK

    order = None
    if args.sort_by is not None:
        order = comparison.ranked(by=args.sort_by, delta=comparison.deltas[0])
    write_output(report_service.comparison_table(parsed.problem, comparison, order), args.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    parsed = problem_file_service.read_problem_file(args.file)
    grid = parse_grid(args.grid)

    if args.perfect:
        report = voi_service.perfect_info_report(parsed.problem, grid)
    else:
        report = voi_service.analyze(parsed.problem, select_measurement(parsed, args.measurement), grid)

    write_output(report_service.sweep_csv(report), args.output)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    parsed = problem_file_service.read_problem_file(args.file)

    if args.canonical:
        text = problem_file_service.render_problem_file(parsed.problem, parsed.measurements, parsed.deltas)
    else:
        text = (
            f"✅ {args.file}: problem '{parsed.problem.name}' is valid "
            f"({len(parsed.problem.state_labels)} states, {len(parsed.problem.actions)} actions, "
            f"{len(parsed.measurements)} measurement(s))\n"
        )
    write_output(text, args.output)
    return EXIT_OK


def build_parser() -> VoiArgumentParser:
    parser = VoiArgumentParser(
        prog="voi",
        description="Value-of-information analysis for discrete decision problems",
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    def add_common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("file", help="Problem file (JSON)")
        sub.add_argument("--output", "-o", help="Write here instead of standard output")

    analyze = commands.add_parser("analyze", help="All metrics for one measurement")
    add_common(analyze)
    analyze.add_argument("--measurement", "-m", help="Measurement name (optional if the file has one)")
    analyze.add_argument("--deltas", help="Comma-separated rVSI thresholds, e.g. 0,0.05")
    analyze.add_argument("--format", choices=("table", "csv"), default="table")
    analyze.add_argument("--perfect", action="store_true", help="Analyze perfect information instead")
    analyze.add_argument("--posteriors", action="store_true", help="Also print p(s|x) per outcome")
    analyze.add_argument("--explain", action="store_true", help="Append what each metric means")
    analyze.set_defaults(handler=cmd_analyze)

    compare = commands.add_parser("compare", help="Rank every measurement design in the file")
    add_common(compare)
    compare.add_argument("--deltas", help="Comma-separated rVSI thresholds, e.g. 0,0.05")
    compare.add_argument("--format", choices=("table", "csv"), default="table")
    compare.add_argument("--sort-by", choices=("evsi", "sigma_vsi", "rvsi"),
                         help="Table order; rvsi uses the first threshold")
    compare.set_defaults(handler=cmd_compare)

    sweep = commands.add_parser("sweep", help="rVSI over a grid of thresholds, as CSV")
    add_common(sweep)
    sweep.add_argument("--measurement", "-m", help="Measurement name (optional if the file has one)")
    sweep.add_argument("--grid", required=True, help="start:stop:step, e.g. 0:20:5")
    sweep.add_argument("--perfect", action="store_true", help="Sweep perfect information instead")
    sweep.set_defaults(handler=cmd_sweep)

    validate = commands.add_parser("validate", help="Parse and validate a problem file")
    add_common(validate)
    validate.add_argument("--canonical", action="store_true", help="Print the canonical document")
    validate.set_defaults(handler=cmd_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging(settings.log_level)
    argv = list(sys.argv[1:] if argv is None else argv)

    try:
        if settings_error is not None:
            raise UsageError(f"Invalid configuration: {settings_error}")
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except VoiError as e:
        logger.debug("%s (exit %d)", type(e).__name__, e.exit_code)
        print(f"❌ {e.detail}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
