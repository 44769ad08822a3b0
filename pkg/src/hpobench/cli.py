"""Command-line entry point: ``hpobench {run,stats,plot,describe,selftest}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .data import describe, load_csv, synth_demand
from .plots import emit_plots
from .runner import (ConfigError, ExperimentConfig, parse_sizes, read_results_csv, run_experiment,
                     run_stats, stats_text, summarize, summary_text, write_outputs)
from .selftest import run_selftest


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--data", help="hourly demand CSV")
    p.add_argument("--synthetic", action="store_true", help="use the synthetic generator")
    p.add_argument("--out")
    p.add_argument("--sizes", help="comma list or start:stop:step")
    p.add_argument("--algos", help="comma list of random,cmaes,bayes,pso,ngopt")
    p.add_argument("--variate", help="univariate, multivariate or both (comma list)")
    p.add_argument("--lags", type=int)
    p.add_argument("--max-trials", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--clock", choices=("wall", "work"))
    p.add_argument("--no-plots", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hpobench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment grid")
    _add_overrides(run)

    st = sub.add_parser("stats", help="summary and significance tables from a results CSV")
    st.add_argument("results")
    st.add_argument("--out", help="directory for summary.txt and stats.txt")
    st.add_argument("--alpha", type=float, default=0.05)

    pl = sub.add_parser("plot", help="regenerate SVG plots from a results CSV")
    pl.add_argument("results")
    pl.add_argument("--out", required=True)

    ds = sub.add_parser("describe", help="descriptive statistics of a demand CSV")
    ds.add_argument("csv", nargs="?")
    ds.add_argument("--synthetic", type=int, metavar="ROWS", help="describe N synthetic rows instead")
    ds.add_argument("--seed", type=int, default=0)

    sub.add_parser("selftest", help="run the built-in invariant checks")
    return parser


def config_from_args(args) -> ExperimentConfig:
    mapping = {}
    if args.config:
        import yaml

        with open(args.config) as fh:
            mapping = yaml.safe_load(fh) or {}
    overrides = {
        "seed": args.seed, "data": args.data, "out": args.out, "lags": args.lags,
        "max_trials": args.max_trials, "patience": args.patience, "repeats": args.repeats,
        "workers": args.workers, "clock": args.clock,
    }
    mapping.update({k: v for k, v in overrides.items() if v is not None})
    if args.synthetic:
        mapping["synthetic"] = True
    elif args.data:
        mapping["synthetic"] = False
    if args.sizes:
        mapping["sizes"] = parse_sizes(args.sizes)
    if args.algos:
        mapping["algorithms"] = args.algos
    if args.variate:
        mapping["variates"] = "univariate,multivariate" if args.variate == "both" else args.variate
    return ExperimentConfig.from_mapping(mapping)


def _cmd_run(args) -> int:
    cfg = config_from_args(args)
    ledger = run_experiment(
        cfg, progress=lambda c: logging.info("%s %s runtime=%.3f", c.run_id, c.status, c.runtime_s))
    paths = write_outputs(ledger, cfg.out, plots=not args.no_plots)
    print(f"wrote {len(ledger.cells)} cells to {paths['results']}")
    for cell in ledger.failed:
        print(f"FAILED {cell.run_id}: {cell.status}", file=sys.stderr)
    return 1 if ledger.failed else 0


def _cmd_stats(args) -> int:
    ledger = read_results_csv(args.results)
    summary = summary_text(summarize(ledger))
    stats = stats_text(run_stats(ledger, args.alpha))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.txt").write_text(summary)
        (out / "stats.txt").write_text(stats)
    sys.stdout.write(summary + "\n" + stats)
    return 0


def _cmd_plot(args) -> int:
    for path in emit_plots(read_results_csv(args.results), args.out):
        print(path)
    return 0


def _cmd_describe(args) -> int:
    if args.synthetic:
        frame = synth_demand(args.synthetic, args.seed)
    elif args.csv:
        frame = load_csv(args.csv)
    else:
        raise ConfigError("give a CSV path or --synthetic ROWS")
    sys.stdout.write(describe(frame).to_text())
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage; 2 on bad flags
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": _cmd_run, "stats": _cmd_stats, "plot": _cmd_plot,
                "describe": _cmd_describe}
    if args.command == "selftest":
        return 0 if run_selftest() else 1
    try:
        return handlers[args.command](args)
    except (ConfigError, OSError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"hpobench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
