import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from genmix.config import settings
from genmix.data.io import save_csv
from genmix.data.models import Dataset
from genmix.exceptions import GenmixError
from genmix.experiments.compare import compare, format_table, write_comparison_csv
from genmix.experiments.runner import EXIT_INVALID_CONFIG, EXIT_OK, EXIT_RUN_FAILED, run_experiment
from genmix.trainer.checkpoint import LoadedCheckpoint, load_checkpoint
from genmix.trainer.loop import sample_mixture

logger = logging.getLogger("genmix")


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=(level or settings.GENMIX_LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genmix", description="Competitive training of generative model mixtures")
    parser.add_argument("--log-level", default=None, help="overrides GENMIX_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="run an experiment from a JSON config")
    run_cmd.add_argument("config")
    run_cmd.add_argument("--seed", type=int, default=None)
    run_cmd.add_argument("--out", default=None)
    run_cmd.add_argument("--dry-run", action="store_true")

    compare_cmd = commands.add_parser("compare", help="compare final KDE log-likelihood of finished runs")
    compare_cmd.add_argument("dirs", nargs="+")
    compare_cmd.add_argument("-o", "--out", default="comparison.csv")

    sample_cmd = commands.add_parser("sample", help="draw points from a saved mixture")
    sample_cmd.add_argument("checkpoint")
    sample_cmd.add_argument("-n", type=int, required=True)
    sample_cmd.add_argument("-o", "--out", required=True)
    sample_cmd.add_argument("--seed", type=int, default=0)

    serve_cmd = commands.add_parser("serve", help="serve run artifacts over HTTP")
    serve_cmd.add_argument("--host", default="127.0.0.1")
    serve_cmd.add_argument("--port", type=int, default=8000)
    return parser


def cmd_compare(args: argparse.Namespace) -> int:
    table = compare(args.dirs)
    if not table:
        logger.error("no run with metrics among %d directories", len(args.dirs))
        return EXIT_RUN_FAILED
    write_comparison_csv(table, args.out)
    print(format_table(table))
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    if args.n < 1:
        logger.error("-n must be positive, got %d", args.n)
        return EXIT_INVALID_CONFIG
    try:
        loaded: LoadedCheckpoint = load_checkpoint(args.checkpoint)
        points: np.ndarray = sample_mixture(loaded.to_state(), args.n, np.random.default_rng(args.seed))
    except GenmixError as e:
        logger.error("cannot sample from %s: %s", args.checkpoint, e)
        return EXIT_RUN_FAILED
    save_csv(Dataset(points=points, name="samples"), args.out)
    logger.info("wrote %d samples from round %d to %s", args.n, loaded.t, args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("genmix.main:app", host=args.host, port=args.port, reload=settings.DEBUG)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    if args.command == "run":
        return run_experiment(args.config, seed=args.seed, out=args.out, dry_run=args.dry_run)
    if args.command == "compare":
        return cmd_compare(args)
    if args.command == "sample":
        return cmd_sample(args)
    return cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
