#!/usr/bin/env python3
"""
Main entry point for the dcov-bounds command line.

Subcommands:
    compute  distance covariance statistics of a CSV dataset
    bound    closed-form bounds for given boxes
    check    the full inequality chain on a CSV dataset
    verify   a Monte Carlo verification campaign
    sweep    tightness across mixture weights, as CSV
"""

import argparse
import dataclasses
import logging
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .config.settings import (
    APP_NAME,
    APP_VERSION,
    DEFAULT_DELIMITER,
    DEFAULT_TOLERANCE_ABS,
    EXIT_CHAIN_VIOLATION,
    EXIT_INVALID_SAMPLE,
    EXIT_OK,
    EXIT_OUTSIDE_BOX,
    EXIT_USAGE,
    HUMAN_DIGITS,
    OUTPUT_FORMATS,
    default_campaign_path,
    setup_logging,
)
from .core.bounds import (
    build_report,
    corollary1_bound,
    corollary2_bound,
    popoviciu_bound,
    theorem_bound,
)
from .core.campaign import CampaignResult, load_campaign_config, run_campaign, tightness_sweep
from .core.estimators import estimate
from .core.exceptions import (
    BadSpecError,
    CampaignError,
    ConfigError,
    DatasetParseError,
    DCovBoundsError,
    InvalidBoxError,
    MalformedRecordError,
    OutputWriteError,
    SampleError,
    SampleOutsideBoxError,
    SizeMismatchError,
)
from .core.sample import BoundsBox, SampleMatrix, infer_box
from .utils.dataset import DatasetFile, format_value, load_dataset, parse_column_list
from .utils.export import ResultExporter

logger = logging.getLogger(__name__)

_NEGATIVE_NUMBER = re.compile(r"^-(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?$")


def exit_code_for(error: DCovBoundsError) -> int:
    """Exit status for each error class."""
    if isinstance(error, CampaignError) and isinstance(error.cause, DCovBoundsError):
        return exit_code_for(error.cause)
    if isinstance(error, SampleOutsideBoxError):
        return EXIT_OUTSIDE_BOX
    if isinstance(error, (DatasetParseError, ConfigError, InvalidBoxError, BadSpecError,
                          SizeMismatchError, MalformedRecordError, OutputWriteError)):
        return EXIT_USAGE
    if isinstance(error, (SampleError, CampaignError)):
        return EXIT_INVALID_SAMPLE
    return EXIT_USAGE


def _human(value: Any) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, (bool, int, str)):
        return str(value)
    return format_value(value, HUMAN_DIGITS)


def _table(pairs: Sequence[Tuple[str, Any]]) -> List[str]:
    width = max(len(name) for name, _ in pairs)
    return [f"{name:<{width}}  {_human(value)}" for name, value in pairs]


def _emit(args: argparse.Namespace, document: Dict[str, Any], lines: List[str]) -> None:
    if args.format == "json":
        ResultExporter.export_to_json(document, args.out)
    else:
        ResultExporter.export_to_txt(lines, args.out)


def _dataset(args: argparse.Namespace) -> DatasetFile:
    return DatasetFile(
        path=Path(args.dataset),
        x_cols=parse_column_list(args.x_cols),
        y_cols=parse_column_list(args.y_cols),
        header=args.header,
        delimiter=args.delimiter,
    )


def cmd_compute(args: argparse.Namespace) -> int:
    """Print dCov, dCov^2, both dVar values, dCor and n for a dataset."""
    x, y = load_dataset(_dataset(args))
    est = estimate(x, y)
    lines = _table([
        ("n", est.n),
        ("dcov", est.dcov),
        ("dcov2", est.dcov2),
        ("dvar_x", est.dvar_x),
        ("dvar_y", est.dvar_y),
        ("dcor", est.dcor),
    ])
    _emit(args, est.to_dict(), lines)
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    """Print the Theorem bound and the corollary values that apply."""
    bx = BoundsBox(args.box_x[0], args.box_x[1], args.dim_x)
    by = BoundsBox(args.box_y[0], args.box_y[1], args.dim_y)

    corollary1 = None
    if bx.is_unit and by.is_unit and bx.dim == by.dim:
        corollary1 = corollary1_bound(bx.dim)
    corollary2 = None
    if bx.dim == 1 and by.dim == 1:
        corollary2 = corollary2_bound(bx, by)

    document = {
        "box_x": bx.to_dict(),
        "box_y": by.to_dict(),
        "theorem_bound": theorem_bound(bx, by),
        "popoviciu_x": popoviciu_bound(bx),
        "popoviciu_y": popoviciu_bound(by),
        "corollary1_bound": corollary1,
        "corollary2_bound": corollary2,
    }
    pairs: List[Tuple[str, Any]] = [
        ("theorem_bound", document["theorem_bound"]),
        ("popoviciu_x", document["popoviciu_x"]),
        ("popoviciu_y", document["popoviciu_y"]),
    ]
    if corollary1 is not None:
        pairs.append(("corollary1_bound", corollary1))
    if corollary2 is not None:
        pairs.append(("corollary2_bound", corollary2))
    lines = _table(pairs)
    if corollary2 is not None:
        lines.append("note: scalar case, the bound reduces to (1/2) sqrt((b-a)(d-c))")
    _emit(args, document, lines)
    return EXIT_OK


def _boxes(
    args: argparse.Namespace, x: SampleMatrix, y: SampleMatrix
) -> Tuple[BoundsBox, BoundsBox]:
    bx = BoundsBox(args.box_x[0], args.box_x[1], x.dim) if args.box_x else infer_box(x)
    by = BoundsBox(args.box_y[0], args.box_y[1], y.dim) if args.box_y else infer_box(y)
    return bx, by


def cmd_check(args: argparse.Namespace) -> int:
    """Print the inequality chain with pass/fail per link."""
    x, y = load_dataset(_dataset(args))
    bx, by = _boxes(args, x, y)
    report = build_report(x, y, bx, by)
    tolerance = args.tolerance

    links = report.links()
    passed = all(link.holds(tolerance) for link in links)
    document = {
        "box_x": bx.to_dict(),
        "box_y": by.to_dict(),
        "report": report.to_dict(),
        "tolerance_abs": tolerance,
        "links": [dict(link.to_dict(), holds=link.holds(tolerance)) for link in links],
        "pass": passed,
    }

    lines = _table([
        ("n", report.n),
        ("box_x", f"[{_human(bx.lo)}, {_human(bx.hi)}]^{bx.dim}"),
        ("box_y", f"[{_human(by.lo)}, {_human(by.hi)}]^{by.dim}"),
        ("observed_dcov", report.observed_dcov),
        ("theorem_bound", report.theorem_bound),
        ("tightness", report.tightness),
    ])
    lines.append("")
    width = max(len(link.name) for link in links)
    for link in links:
        status = "pass" if link.holds(tolerance) else "FAIL"
        lines.append(
            f"{link.name:<{width}}  {_human(link.lhs):>12} <= {_human(link.rhs):<12}  {status}"
        )
    lines.append("")
    lines.append("all links hold" if passed else "chain violated")
    _emit(args, document, lines)
    return EXIT_OK if passed else EXIT_CHAIN_VIOLATION


def _campaign_lines(result: CampaignResult) -> List[str]:
    lines = []
    for summary in result.per_spec:
        lines.append(summary.spec_id)
        lines.extend(f"  {line}" for line in _table([
            ("replicates_run", summary.replicates_run),
            ("chain_violations", summary.chain_violations),
            ("max_violation", summary.max_violation),
            ("tightness_min", summary.tightness_min),
            ("tightness_median", summary.tightness_median),
            ("tightness_max", summary.tightness_max),
            ("mean_dcov", summary.mean_dcov),
            ("dcor_defined_fraction", summary.dcor_defined_fraction),
        ]))
    lines.append("overall: " + ("pass" if result.overall_pass else "FAIL"))
    return lines


def cmd_verify(args: argparse.Namespace) -> int:
    """Run a campaign; exit 0 iff no link was violated."""
    config_path = args.config or default_campaign_path()
    config = load_campaign_config(config_path)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    if args.workers is not None:
        config = dataclasses.replace(config, workers=args.workers)
    logger.info(f"Running campaign from {config_path}")

    result = run_campaign(config)
    _emit(args, result.to_dict(), _campaign_lines(result))
    return EXIT_OK if result.overall_pass else EXIT_CHAIN_VIOLATION


def parse_number_list(text: str) -> List[float]:
    """Comma-separated decimal numbers, e.g. ``"0,0.25,1"``."""
    try:
        return [float(item) for item in (part.strip() for part in text.split(","))]
    except ValueError as e:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from e


def cmd_sweep(args: argparse.Namespace) -> int:
    """Median tightness per mixture weight, written as CSV."""
    weights = parse_number_list(args.weights)
    rows = tightness_sweep(
        box_x=BoundsBox(args.box_x[0], args.box_x[1], args.dim_x),
        box_y=BoundsBox(args.box_y[0], args.box_y[1], args.dim_y),
        n=args.n,
        weights=weights,
        replicates=args.replicates,
        seed=args.seed,
    )
    ResultExporter.export_to_csv(rows, args.out)
    violations = sum(row["chain_violations"] for row in rows)
    return EXIT_OK if violations == 0 else EXIT_CHAIN_VIOLATION


def _add_output_options(parser: argparse.ArgumentParser, default_format: str = "human") -> None:
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default=default_format,
                        help="human: 6 significant digits; json: exact round-trip values")
    parser.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")


def _add_dataset_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("dataset", help="CSV file")
    parser.add_argument("--x-cols", default="0",
                        help="columns forming X: indices, ranges a-b or header names (default 0)")
    parser.add_argument("--y-cols", default="1",
                        help="columns forming Y (default 1)")
    parser.add_argument("--header", action="store_true", help="first row holds column names")
    parser.add_argument("--delimiter", default=DEFAULT_DELIMITER, help="field delimiter")


class NumericArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reads ``-1e-3`` as a value, not as an option flag."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        # Stock argparse only treats -12 and -1.5 as negative numbers
        self._negative_number_matcher = _NEGATIVE_NUMBER


def _add_box_dims(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--box-x", nargs=2, type=float, metavar=("LO", "HI"), default=[0.0, 1.0])
    parser.add_argument("--box-y", nargs=2, type=float, metavar=("LO", "HI"), default=[0.0, 1.0])
    parser.add_argument("--dim-x", type=int, default=1, metavar="N")
    parser.add_argument("--dim-y", type=int, default=1, metavar="M")


def build_parser() -> argparse.ArgumentParser:
    parser = NumericArgumentParser(
        prog=APP_NAME,
        description="Distance covariance estimates and upper bounds for bounded random vectors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--log-file", metavar="PATH", help="also log to this file")
    commands = parser.add_subparsers(dest="command", required=True)

    compute = commands.add_parser("compute", help="dCov, dVar and dCor of a dataset")
    _add_dataset_options(compute)
    _add_output_options(compute)
    compute.set_defaults(handler=cmd_compute)

    bound = commands.add_parser("bound", help="upper bound on dCov for [a,b]^N x [c,d]^M")
    _add_box_dims(bound)
    _add_output_options(bound)
    bound.set_defaults(handler=cmd_bound)

    check = commands.add_parser("check", help="verify the inequality chain on a dataset")
    _add_dataset_options(check)
    check.add_argument("--box-x", nargs=2, type=float, metavar=("LO", "HI"),
                       help="declared box for X (default: smallest box containing X)")
    check.add_argument("--box-y", nargs=2, type=float, metavar=("LO", "HI"),
                       help="declared box for Y (default: smallest box containing Y)")
    check.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE_ABS,
                       help="absolute slack per link")
    _add_output_options(check)
    check.set_defaults(handler=cmd_check)

    verify = commands.add_parser("verify", help="run a Monte Carlo verification campaign")
    verify.add_argument("config", nargs="?", help="campaign JSON (default: shipped campaign)")
    verify.add_argument("--seed", type=int, help="reseed every spec from this base seed")
    verify.add_argument("--workers", type=int, help="replicates run in parallel")
    _add_output_options(verify, default_format="json")
    verify.set_defaults(handler=cmd_verify)

    sweep = commands.add_parser("sweep", help="tightness across mixture weights (CSV)")
    _add_box_dims(sweep)
    sweep.add_argument("-n", type=int, default=200, help="observations per replicate")
    sweep.add_argument("--weights", default="0,0.25,0.5,0.75,1",
                       help="comma-separated mixture weights")
    sweep.add_argument("--replicates", type=int, default=20)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out", metavar="PATH", help="CSV file (default: stdout)")
    sweep.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Command line entry point; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        setup_logging(logging.DEBUG if args.verbose else logging.WARNING, args.log_file)
    except OSError as e:
        print(f"error: cannot open log file {args.log_file}: {e.strerror or e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return int(args.handler(args))
    except DCovBoundsError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
