"""Command-line experiment driver.

One subcommand per experiment; every run writes a CSV table, a plain-text
summary, the exact configuration it ran with, and (unless --no-plot) a
figure.  Exit codes: 0 all thresholds passed, 1 scientific threshold
failure, 2 usage or configuration error.

The default output directory can be set with SCRAMBLAB_OUT.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time
from pathlib import Path

from . import experiments
from .config import ExperimentConfig
from .presets import EXPERIMENT_KINDS, list_presets
from .report import write_outputs
from .states import CapExceededError
from .typicality import EmptyShellError

_DEFAULT_N_LISTS = {
    "page-purity": (3, 8),
    "cross-overlap": (4, 6, 8, 10),
    "components": (6, 8, 10),
    "factorization": (5, 6, 7, 8),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=1, help="master seed")
    p.add_argument("--out", default=None, help="output directory "
                   "(default: $SCRAMBLAB_OUT or ./results)")
    p.add_argument("--threads", type=int, default=1, help="worker cap; results "
                   "are identical for any value")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p.add_argument("--config", default=None, help="load settings from an INI file "
                   "emitted by a previous run (flags still override)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scramblab",
                                 description="scrambled-encoding numerical laboratory")
    sub = ap.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("haar-moments", help="MC vs exact Haar entry moments")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--samples", type=int, default=100000)
    _add_common(p)

    p = sub.add_parser("page-purity", help="mean marginal purity vs exact average")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N-list", type=int, nargs="+", default=None)
    p.add_argument("--samples", type=int, default=10000)
    _add_common(p)

    p = sub.add_parser("cross-overlap", help="cross-input Schmidt overlap decay")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N-list", type=int, nargs="+", default=None)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--seeds", type=int, default=50)
    _add_common(p)

    p = sub.add_parser("components", help="component extraction + Gram residual")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N-list", type=int, nargs="+", default=None)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--generator", default="pauli-z-like")
    _add_common(p)

    p = sub.add_parser("factorization", help="overlap factorization error vs N")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N-list", type=int, nargs="+", default=None)
    p.add_argument("--delta", type=float, nargs="+", default=[0.3, 0.7])
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--generator", default="pauli-z-like")
    _add_common(p)

    p = sub.add_parser("fisher", help="metric two-route identity + derivative check")
    p.add_argument("--frames", type=int, default=50)
    p.add_argument("--specs", type=int, default=20)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", type=int, default=6)
    p.add_argument("--n", type=int, default=2)
    _add_common(p)

    p = sub.add_parser("isometry", help="rotational isometry of the metric")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--grid", type=int, default=3)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--generator", default="pauli-z-like")
    _add_common(p)

    p = sub.add_parser("isometry-lowT", help="isometry breaking under narrow-shell scrambling")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--grid", type=int, default=2)
    p.add_argument("--pairs", type=int, default=25)
    p.add_argument("--generator", default="pauli-z-like")
    _add_common(p)

    p = sub.add_parser("typicality", help="shell typicality vs Gibbs comparator")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--E-tot", type=float, default=None)
    p.add_argument("--dE", type=float, default=0.0)
    p.add_argument("--beta-width", type=float, default=None)
    _add_common(p)

    sub.add_parser("list-presets", help="show generator presets, experiments, tolerances")
    return ap


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    base = {}
    if getattr(args, "config", None):
        base = vars(ExperimentConfig.from_ini(Path(args.config).read_text()))
    cfg = ExperimentConfig(kind=args.kind, **{k: v for k, v in base.items() if k != "kind"})
    for name in ("seed", "threads", "d", "N", "n", "m", "dim", "samples", "grid",
                 "generator", "dE", "beta_width"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "E_tot", None) is not None:
        cfg.E_tot = args.E_tot
    if getattr(args, "seeds", None) is not None:
        cfg.seeds = args.seeds
    if getattr(args, "pairs", None) is not None:
        cfg.seeds = args.pairs
    if getattr(args, "frames", None) is not None:
        cfg.samples = args.frames
    if getattr(args, "specs", None) is not None:
        cfg.seeds = args.specs
    if getattr(args, "delta", None) is not None:
        cfg.delta = tuple(args.delta)
    N_list = getattr(args, "N_list", None)
    cfg.N_list = tuple(N_list) if N_list else _DEFAULT_N_LISTS.get(args.kind, ())
    out = getattr(args, "out", None) or os.environ.get("SCRAMBLAB_OUT", "results")
    cfg.out = out
    return cfg


def run_config(cfg: ExperimentConfig, plot: bool = True) -> int:
    """Run one experiment config; writes outputs, returns the exit code."""
    t0 = time.monotonic()
    kind = cfg.kind
    if kind == "haar-moments":
        rows, summary = experiments.haar_moments(cfg.dim, cfg.samples, cfg.seed, cfg.threads)
    elif kind == "page-purity":
        rows, summary = experiments.page_purity(cfg.d, cfg.N_list, cfg.samples,
                                                cfg.seed, cfg.threads)
    elif kind == "cross-overlap":
        rows, summary = experiments.cross_overlap(cfg.d, cfg.N_list, cfg.m, cfg.seeds,
                                                  cfg.seed, cfg.threads)
    elif kind == "components":
        rows, summary = experiments.components(cfg.d, cfg.n, cfg.N_list, cfg.seeds,
                                               cfg.seed, cfg.generator, cfg.threads)
    elif kind == "factorization":
        rows, summary = experiments.factorization(cfg.d, cfg.n, cfg.N_list, cfg.delta,
                                                  cfg.seeds, cfg.seed, cfg.generator,
                                                  cfg.threads)
    elif kind == "fisher":
        rows, summary = experiments.fisher_two_route(cfg.samples, cfg.seed, cfg.d,
                                                     cfg.N, cfg.n, cfg.generator,
                                                     cfg.threads)
        rows2, summary2 = experiments.fisher_derivative_check(cfg.seeds, cfg.seed,
                                                              cfg.d, cfg.N, cfg.n,
                                                              cfg.generator,
                                                              threads=cfg.threads)
        summary = {**{f"route_{k}": v for k, v in summary.items()},
                   **{f"fd_{k}": v for k, v in summary2.items()},
                   "passed": summary["passed"] and summary2["passed"]}
        rows = rows + [{"frame": r["spec"], "d": r["d"], "N": r["N"], "n": r["n"],
                        "max_route_diff": r["rel_error"]} for r in rows2]
    elif kind == "isometry":
        rows, summary = experiments.isometry(cfg.d, cfg.N, cfg.n, cfg.grid, cfg.seeds,
                                             cfg.seed, cfg.generator, cfg.threads)
    elif kind == "isometry-lowT":
        rows, summary = experiments.isometry_low_temperature(
            cfg.d, cfg.N, cfg.n, cfg.grid, cfg.seeds, cfg.seed,
            generator_name=cfg.generator, threads=cfg.threads)
    elif kind == "typicality":
        rows, summary = experiments.typicality(cfg.d, cfg.N, cfg.m, cfg.samples,
                                               cfg.seed, E_tot=cfg.E_tot, dE=cfg.dE,
                                               beta_width=cfg.beta_width,
                                               threads=cfg.threads)
    else:
        raise ValueError(f"unknown experiment kind {kind!r}")

    summary = dict(summary)
    summary["wall_clock_s"] = round(time.monotonic() - t0, 3)
    out_dir = Path(cfg.out)
    paths = write_outputs(out_dir, kind.replace("-", "_"), rows, summary,
                          cfg.to_ini(), cfg.config_hash(), cfg.seed)
    if plot:
        from .plots import plot_experiment
        plot_experiment(kind, rows, summary,
                        out_dir / f"{kind.replace('-', '_')}.png")
    print(f"[{kind}] {'PASS' if summary.get('passed') else 'FAIL'} "
          f"({summary['wall_clock_s']}s) -> {paths['csv']}")
    for k, v in summary.items():
        print(f"  {k} = {v}")
    return 0 if summary.get("passed") else 1


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    if args.kind == "list-presets":
        print(list_presets())
        return 0
    try:
        cfg = _config_from_args(args)
        return run_config(cfg, plot=not args.no_plot)
    except (ValueError, KeyError, OSError, configparser.Error,
            CapExceededError, EmptyShellError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
