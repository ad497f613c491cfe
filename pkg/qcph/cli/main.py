"""
Command-line entry point: features, barcodes, verify, train, predict and cv.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .. import __version__
from ..config.settings import Config, RunConfig, build_run_config
from ..core.app import QCPipeline
from ..exceptions import ConfigError, QCPHError
from ..features.descriptors import read_features_csv
from ..regress.gbt import model_from_json, model_to_json
from ..topology.verification import run_theorem_suite
from ..utils.helpers import format_significant

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration merged over the defaults")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--atom-set", dest="atom_sets", action="append", metavar="TAG",
                        help="restrict to this atom set (repeatable)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--workers", type=int, help="worker processes, 0 = one per physical core")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="qcph", description="Quotient-complex persistent homology descriptors "
                                              "for periodic crystals")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    features = commands.add_parser("features", parents=[common], help="feature CSV of structure files")
    features.add_argument("inputs", nargs="*", help=".cif or .json structure files")
    features.add_argument("--format", choices=["cif", "json"], help="override extension detection")

    barcodes = commands.add_parser("barcodes", parents=[common], help="barcodes of K and K̃ as JSON")
    barcodes.add_argument("input", help="structure file or explicit filtration")
    barcodes.add_argument("--format", choices=Config.FORMATS, help="override extension detection")

    verify = commands.add_parser("verify", parents=[common], help="randomized theorem suite")
    verify.add_argument("--trials", type=int, default=Config.VERIFY_TRIALS)
    verify.add_argument("--star-value", type=float, default=Config.STAR_VALUE,
                        help=argparse.SUPPRESS)

    train = commands.add_parser("train", parents=[common], help="fit the regressor, write model JSON")
    train.add_argument("--features", required=True, help="feature CSV")
    train.add_argument("--labels", required=True, help="label CSV (id,value)")

    predict = commands.add_parser("predict", parents=[common], help="predictions CSV from a model")
    predict.add_argument("--features", required=True, help="feature CSV")
    predict.add_argument("--model", required=True, help="model JSON written by train")
    predict.add_argument("--labels", help="label CSV; enables --metrics")
    predict.add_argument("--metrics", help="metrics JSON path (needs --labels)")

    cv = commands.add_parser("cv", parents=[common], help="repeated k-fold cross-validation")
    cv.add_argument("--features", required=True, help="feature CSV")
    cv.add_argument("--labels", required=True, help="label CSV (id,value)")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _write_output(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _run_config(args) -> RunConfig:
    overrides = {"atom_sets": args.atom_sets, "seed": args.seed, "workers": args.workers}
    return build_run_config(args.config, overrides)


def cmd_features(args, run: RunConfig) -> int:
    pipeline = QCPipeline(run)
    results = pipeline.extract(args.inputs, args.format)
    status = pipeline.controller.get_status(results)
    if status["failed"]:
        logger.warning(
            f"{len(status['failed'])} of {status['total']} file(s) skipped: "
            f"{', '.join(Path(path).name for path in status['failed'])}"
        )
    if status["total"] and not status["succeeded"]:
        logger.error(f"all {status['total']} input file(s) failed")
        return EXIT_DATA
    _write_output(pipeline.features_csv(results), args.out)
    return EXIT_OK


def cmd_barcodes(args, run: RunConfig) -> int:
    document = QCPipeline(run).barcodes(args.input, args.format)
    _write_output(json.dumps(document, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args, run: RunConfig) -> int:
    if args.trials < 0:
        raise ConfigError("/trials", "must be non-negative")
    report = run_theorem_suite(seed=run.seed, trials=args.trials, star_value=args.star_value)
    _write_output(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_train(args, run: RunConfig) -> int:
    pipeline = QCPipeline(run)
    _, names, X, y = pipeline.load_training_data(args.features, args.labels)
    model = pipeline.train(X, y, names)
    _write_output(model_to_json(model, names), args.out)
    return EXIT_OK


def _predictions_csv(ids: List[str], values) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id", "prediction"])
    for structure_id, value in zip(ids, values):
        writer.writerow([structure_id, format_significant(float(value), Config.CSV_SIGNIFICANT_DIGITS)])
    return buffer.getvalue()


def cmd_predict(args, run: RunConfig) -> int:
    if args.metrics and not args.labels:
        raise ConfigError("/metrics", "--metrics needs --labels")
    pipeline = QCPipeline(run)
    model = model_from_json(Path(args.model).read_text(encoding="utf-8"))
    if args.labels:
        ids, _, X, y = pipeline.load_training_data(args.features, args.labels,
                                                   require_all_labels_used=False)
    else:
        ids, _, X = read_features_csv(Path(args.features).read_text(encoding="utf-8"))
        y = None
    predictions = pipeline.predict(model, X)
    _write_output(_predictions_csv(ids, predictions), args.out)

    if y is not None:
        report = pipeline.evaluate(y, predictions)
        text = json.dumps(report.to_dict(), indent=2) + "\n"
        if args.metrics:
            Path(args.metrics).write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stderr.write(text)
    return EXIT_OK


def cmd_cv(args, run: RunConfig) -> int:
    pipeline = QCPipeline(run)
    _, _, X, y = pipeline.load_training_data(args.features, args.labels)
    result = pipeline.cross_validate(X, y)
    _write_output(json.dumps(result.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    "features": cmd_features,
    "barcodes": cmd_barcodes,
    "verify": cmd_verify,
    "train": cmd_train,
    "predict": cmd_predict,
    "cv": cmd_cv,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        run = _run_config(args)
    except ConfigError as e:
        sys.stderr.write(f"qcph: invalid configuration {e}\n")
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, run)
    except ConfigError as e:
        sys.stderr.write(f"qcph: {e}\n")
        return EXIT_USAGE
    except (QCPHError, OSError) as e:
        sys.stderr.write(f"qcph: {type(e).__name__}: {e}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
