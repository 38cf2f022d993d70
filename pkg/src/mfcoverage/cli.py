"""Command-line entry point.

Subcommands:
  run       execute the configured algorithm, write run + aggregate CSVs
  compare   run the whole policy grid (baseline, smlc/dmlc x multi/single)
  fit       maximum-likelihood hyperparameter fit; prints pinnable values
  validate  check a config file

Exit codes: 0 on success, 1 on a runtime failure (one-line diagnostic on
stderr), 2 on a usage error.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from . import harness


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mfcoverage",
        description="Multi-fidelity learning-and-coverage simulation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH",
                       help="config JSON (default: the packaged default config)")
        p.add_argument("--seed", type=int, metavar="U64",
                       help="override the config's master seed")
        p.add_argument("--runs", type=int, metavar="R",
                       help="override the config's run count")

    p_run = sub.add_parser("run", help="run the configured algorithm")
    common(p_run)
    p_run.add_argument("--out", default="metrics", metavar="DIR",
                       help="output directory (default: metrics)")

    p_cmp = sub.add_parser("compare", help="run the full policy grid")
    common(p_cmp)
    p_cmp.add_argument("--out", default="metrics", metavar="DIR",
                       help="output directory (default: metrics)")

    p_fit = sub.add_parser("fit", help="fit hyperparameters by MLE and print them")
    common(p_fit)
    p_fit.add_argument("--out", metavar="DIR",
                       help="also write a config with the fitted values pinned")

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", metavar="PATH")
    return parser


def _load(args):
    config = (harness.load_config(args.config) if args.config
              else harness.default_config())
    if getattr(args, "seed", None) is not None:
        config = replace(config, master_seed=args.seed)
    if getattr(args, "runs", None) is not None:
        config = replace(config, runs=args.runs)
    return config.validate()


def _cmd_run(args):
    config = _load(args)
    os.makedirs(args.out, exist_ok=True)
    records, agg = harness.run_batch(config)
    name = harness.batch_name(config.algorithm, config.fidelity_mode)
    runs_path = os.path.join(args.out, f"{name}.csv")
    agg_path = os.path.join(args.out, f"{name}_agg.csv")
    harness.write_metrics(records, runs_path, master_seed=config.master_seed)
    harness.write_aggregate(agg, agg_path, master_seed=config.master_seed)
    final_regret = agg.mean["cum_regret"][-1]
    print(f"{name}: {config.runs} runs x {config.iterations} iterations, "
          f"mean cumulative regret {final_regret:.4f} -> {runs_path}")
    return 0


def _cmd_compare(args):
    config = _load(args)
    written = harness.run_compare(config, args.out)
    for name, (runs_path, _) in written.items():
        print(f"{name}: wrote {runs_path}")
    return 0


def _cmd_fit(args):
    config = _load(args)
    pinned = harness.fit_hyper(config)
    print(json.dumps(harness._pinned_to_dict(pinned), indent=2))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        fitted = replace(config, hyper=harness.HyperSource("pinned", pinned))
        path = os.path.join(args.out, "fitted_config.json")
        harness.save_config(fitted, path)
        print(f"wrote {path}")
    return 0


def _cmd_validate(args):
    config = (harness.load_config(args.config) if args.config
              else harness.default_config())
    config.validate()
    print("config OK")
    return 0


def cli_main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"run": _cmd_run, "compare": _cmd_compare,
                "fit": _cmd_fit, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except (harness.ConfigError, harness.MetricsParseError,
            harness.BatchRunError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
