"""Command line entry point: ``trustchain simulate|sweep|estimate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .harness.config import ConfigError, ExperimentSpec, load_config, parse_seeds, parse_sweep_values
from .harness.estimate import METHODS, estimate_trust, load_history
from .harness.experiment import run_experiment, simulate_to_dir
from .trust import BetaPrior


def _base_config(path):
    cfg = load_config(path)
    return cfg.base if isinstance(cfg, ExperimentSpec) else cfg


def cmd_simulate(args) -> None:
    cfg = _base_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed: must be a 64-bit unsigned integer, got {args.seed}")
        cfg = replace(cfg, seed=args.seed)
    row = simulate_to_dir(cfg, Path(args.out))
    logging.info("gini=%s acceptance=%s", row["gini"], row["acceptance_rate"])


def cmd_sweep(args) -> None:
    base = _base_config(args.config)
    values = parse_sweep_values(args.param, args.values)
    spec = ExperimentSpec(base, args.param, values, parse_seeds(args.seeds), Path(args.out))
    run_experiment(spec, workers=args.workers)


def cmd_estimate(args) -> None:
    history = load_history(args.history)
    result = estimate_trust(
        history,
        method=args.method,
        prior=BetaPrior(args.prior_a, args.prior_b),
        steps=args.steps,
        burn_in=args.burn_in,
        proposal_std=args.proposal_std,
        seed=args.seed,
        window=args.window,
        decay_lambda=args.decay_lambda,
        n_chains=args.chains,
    )
    out = Path(args.out)
    try:
        out.write_text(json.dumps(result.as_dict(), indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trustchain", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one simulation and write CSVs")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter sweep over seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, help="dotted config key, e.g. lottery.nb_success_prob")
    p.add_argument("--values", required=True, help="comma separated values")
    p.add_argument("--seeds", required=True, help="a count n (seeds 0..n-1) or a comma list")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("estimate", help="estimate trust from a validation history CSV")
    p.add_argument("--history", required=True)
    p.add_argument("--method", choices=METHODS, default="counting")
    p.add_argument("--steps", type=int, default=55_000)
    p.add_argument("--burn-in", type=int, default=None, help="default: 10%% of steps")
    p.add_argument("--prior-a", type=float, default=0.5)
    p.add_argument("--prior-b", type=float, default=0.5)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--proposal-std", type=float, default=0.3)
    p.add_argument("--decay-lambda", type=float, default=None)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"trustchain {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
