"""Command-line entry point: ``hetvenet simulate | schedule | oracle``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from hetvenet import harness
from hetvenet.harness import ConfigError
from hetvenet.metrics import summarize
from hetvenet.scheduler import (ALL_SCHEMES, Scheme, brute_force_maxmin, run_scheme,
                                schedule_ms_maxmin)
from hetvenet.service import compute_air_snapshot, compute_service_tables, dump_service_csv

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _config(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config)
    changes = {}
    if getattr(args, "out", None):
        changes["output_path"] = args.out
    if getattr(args, "master_seed", None) is not None:
        changes["master_seed"] = args.master_seed
    if changes:
        cfg = harness.ExperimentConfig(**{**cfg.__dict__, **changes})
    return cfg


def cmd_simulate(args) -> int:
    cfg = _config(args)
    records = harness.run_experiment(cfg, workers=args.workers)
    harness.write_csv(records, cfg.output_path)
    print(harness.summary_table(records))
    print(f"\nwrote {len(records)} records to {cfg.output_path}")
    return EXIT_OK


def cmd_schedule(args) -> int:
    cfg = _config(args)
    schemes = [Scheme.parse(args.scheme)] if args.scheme else list(cfg.schemes)
    scenario = harness.generate_scenario(cfg, args.n, args.seed)
    tables = compute_service_tables(scenario, cfg.lte, cfg.dsrc)
    snapshot = compute_air_snapshot(scenario, cfg.lte, cfg.dsrc)
    n_lte, n_dsrc = cfg.lte.rb_pool, cfg.dsrc.rb_pool
    if args.dump_service:
        dump_service_csv(tables, args.dump_service)
        print(f"service tables written to {args.dump_service}")
    reference, _ = schedule_ms_maxmin(tables, n_lte, n_dsrc)
    rng_seed = harness.random_scheme_seed(cfg.master_seed, args.n, args.seed)
    print("scheme,n_f,pairs,m,total_service,fv_throughput,min_vn_rate,jain_index")
    for scheme in schemes:
        schedule, eff = run_scheme(scheme, tables, snapshot, n_lte, n_dsrc, rng_seed)
        res = summarize(eff, schedule, scenario.horizon, reference.far_vehicles)
        print(f"{scheme.value},{schedule.n_f},{schedule.pairs_str()},{eff.m:.12g},{eff.total:.12g},"
              f"{res.total_fv_service:.12g},{res.min_vn_rate:.12g},{res.jain_index:.12g}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    if not 1 <= args.n <= 8:
        raise ConfigError("oracle is exhaustive; --n must be between 1 and 8")
    cfg = _config(args)
    n_lte, n_dsrc = cfg.lte.rb_pool, cfg.dsrc.rb_pool
    gaps, equal, violations = [], 0, 0
    for seed in range(args.seeds):
        scenario = harness.generate_scenario(cfg, args.n, seed)
        tables = compute_service_tables(scenario, cfg.lte, cfg.dsrc)
        _, eff = schedule_ms_maxmin(tables, n_lte, n_dsrc)
        best = brute_force_maxmin(tables, n_lte, n_dsrc)
        violations += eff.m > best
        equal += eff.m == best
        gaps.append((best - eff.m) / best if best > 0 else 0.0)
    gaps = np.asarray(gaps)
    print(f"n={args.n} instances={args.seeds}")
    print(f"greedy == brute force: {equal}/{args.seeds} ({equal / args.seeds:.1%})")
    print(f"greedy >  brute force (should be 0): {violations}")
    print(f"relative gap: mean {gaps.mean():.4g}, max {gaps.max():.4g}")
    return EXIT_OK if violations == 0 else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetvenet", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the full Monte-Carlo sweep")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out")
    p.add_argument("--master-seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("schedule", help="inspect one scenario")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--master-seed", type=int)
    p.add_argument("--scheme", help=f"one of {', '.join(s.value for s in ALL_SCHEMES)}")
    p.add_argument("--dump-service", metavar="CSV", help="write the per-RB service tables here")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("oracle", help="greedy vs brute-force max-min report")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--master-seed", type=int)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
