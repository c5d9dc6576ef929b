"""
Command-line entry point ``zopd``.

Examples:
  # Learn the AWGN program with the built-in configuration
  zopd run --preset awgn --out runs/awgn

  # Four replicates with seeds 7..10, each in runs/toy/seed_<s>/
  zopd run --config toy.ini --seed 7 --replicates 4 --out runs/toy

  # Baselines only, and the duality diagnostics
  zopd baselines --preset mai
  zopd diag --preset diag

Exit codes: 0 on success, 2 on a configuration error, 3 on a numerical abort.
"""

from __future__ import annotations

import argparse
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Optional, Sequence

from .._version import __version__
from ..utils.exceptions import ConfigError, NumericalAbort
from .config import EXPERIMENTS, ExperimentConfig, preset
from .experiment import run_baselines, run_diagnostics, run_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zopd",
        description="Model-free primal-dual learning of ergodic resource allocation policies.",
        epilog=__doc__.split("Exit codes")[0] if __doc__ else None,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("run", "learn a policy and write its trace and summary"),
        ("diag", "run the duality-gap and sandwich diagnostics"),
        ("baselines", "evaluate the classical baselines only"),
    ):
        sub = commands.add_parser(name, help=help_text)
        source = sub.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", "-c", type=Path, help="INI configuration file")
        source.add_argument("--preset", "-p", choices=EXPERIMENTS, help="built-in configuration")
        sub.add_argument("--seed", type=int, help="override experiment.seed")
        sub.add_argument("--out", "-o", type=Path, help="override output.out_dir")
        sub.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
        if name == "run":
            sub.add_argument(
                "--replicates", "-r", type=int, default=1,
                help="run seeds seed..seed+k-1 in parallel, each in <out>/seed_<s>/ (default: 1)",
            )
            sub.add_argument("--progress", action="store_true", help="show a progress bar")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Configuration selected on the command line, with overrides applied.

    Raises:
        ConfigError: If the file or an override is invalid.
    """
    config = ExperimentConfig.from_file(args.config) if args.config is not None else preset(args.preset)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["out_dir"] = str(args.out)
    return config.with_overrides(**changes) if changes else config


def _run_replicate(job: tuple[str, int, str, bool]) -> tuple[int, int]:
    # Runs in a worker process; returns (seed, exit code).
    config_text, seed, out_dir, progress = job
    config = ExperimentConfig.from_ini_text(config_text).with_overrides(seed=seed)
    try:
        run_experiment(config, out_dir, progress=progress)
    except NumericalAbort as exc:
        logger.error("Seed %d aborted: %s", seed, exc)
        return seed, EXIT_ABORT
    return seed, EXIT_OK


def _command_run(config: ExperimentConfig, replicates: int, progress: bool) -> int:
    if replicates < 1:
        raise ConfigError("--replicates", "must be at least 1")
    if replicates == 1:
        run_experiment(config, progress=progress)
        return EXIT_OK

    text = config.to_ini_text()
    out = Path(config.out_dir)
    jobs = [(text, config.seed + k, str(out / f"seed_{config.seed + k}"), False) for k in range(replicates)]
    codes: dict[int, int] = {}
    with ProcessPoolExecutor(max_workers=min(replicates, 8)) as executor:
        futures = {executor.submit(_run_replicate, job): job[1] for job in jobs}
        for future in as_completed(futures):
            seed, code = future.result()
            codes[seed] = code
            logger.info("Replicate seed %d finished with exit code %d", seed, code)
    return max(codes.values())


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_config(args)
        if args.command == "run":
            return _command_run(config, args.replicates, args.progress)
        if args.command == "baselines":
            run_baselines(config)
            return EXIT_OK
        result = run_diagnostics(config)
        if not result.ok:
            logger.error("Diagnostics reported failed checks; see %s", config.out_dir)
        return EXIT_OK
    except ConfigError as exc:
        logger.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        logger.error("Numerical abort: %s", exc)
        return EXIT_ABORT


if __name__ == "__main__":
    raise SystemExit(main())
