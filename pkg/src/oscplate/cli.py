"""Command-line driver: ``oscplate <experiment> --config cfg.json --out table.csv``.

Exit codes: 0 success, 1 invalid input, 2 tolerance failure, 3 numerical failure.
The cell experiment also writes a JSON document (gamma, gamma_flux, modes) next
to the ``--out`` CSV, with the suffix ``.json``.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ExperimentConfig
from .errors import InvalidArgument, NumericalFailure
from .experiments import EXPERIMENTS

EXIT_OK, EXIT_INPUT, EXIT_TOLERANCE, EXIT_NUMERICAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oscplate", description=__doc__.splitlines()[0])
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="JSON configuration (defaults apply if omitted)")
    p.add_argument("--out", help="CSV output path (stdout if omitted)")
    p.add_argument("--threads", type=int, help="worker processes for sweeps")
    p.add_argument("--seed", type=int, help="seed of the eigensolver start vectors")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        if args.threads is not None:
            cfg.threads = args.threads
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.__post_init__()
        table = EXPERIMENTS[args.experiment](cfg)
    except (InvalidArgument, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"numerical failure in {args.experiment}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    table.write_csv(args.out if args.out else sys.stdout)
    if table.sidecar is not None and args.out:
        table.write_json(Path(args.out).with_suffix(".json"))
    for line in table.summary:
        print(line, file=sys.stderr)
    print(f"{args.experiment}: {'PASS' if table.ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if table.ok else EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
