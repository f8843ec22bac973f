"""Command-line entry point.

One subcommand per experiment (plus a `freegroup` shorthand mapping the
--check flag onto the two free-group experiments).  A JSON config can seed
any run; inline flags override it.  Exit codes: 0 all assertions passed,
1 at least one instance failed an asserted inequality, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import sys

from ncmaxlab.harness.config import EXPERIMENTS, ConfigError, \
    ExperimentConfig, load_config, override


def _parse_dims(text: str):
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad dims {text!r}: {exc}") from exc


def _parse_floats(text: str):
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}: {exc}") from exc


def _parse_tolerances(pairs):
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"tolerance override needs NAME=VALUE, got {pair!r}")
        name, _, value = pair.partition("=")
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in {pair!r}") from exc
    return out


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file (flags override it)")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--corpus-size", type=int, dest="corpus_size")
    sp.add_argument("--dims", type=str,
                    help="comma-separated dimensions, e.g. 4,8,16")
    sp.add_argument("--r-min", type=int, dest="r_min")
    sp.add_argument("--r-max", type=int, dest="r_max")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--phi-alpha", type=float, dest="phi_alpha")
    sp.add_argument("--depth", type=int)
    sp.add_argument("--max-len", type=int, dest="max_len")
    sp.add_argument("--t-values", type=str, dest="t_values",
                    help="comma-separated t grid, e.g. 0.1,1")
    sp.add_argument("--tolerance", action="append", metavar="NAME=VALUE",
                    help="override a named tolerance (repeatable)")
    sp.add_argument("--output", help="report directory (default: reports)")
    sp.add_argument("--no-figures", action="store_true",
                    help="skip PNG rendering; CSV/JSON only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncmaxlab",
        description="Numerical laboratory for maximal inequalities on "
                    "matrix algebras with normalized trace.")
    parser.add_argument("--list", action="store_true",
                        help="print the experiment catalog and exit")
    sub = parser.add_subparsers(dest="command")
    for name in sorted(EXPERIMENTS):
        sp = sub.add_parser(name, help=EXPERIMENTS[name])
        _add_common(sp)
    fg = sub.add_parser(
        "freegroup",
        help="shorthand for the free-group checks (--check selects)")
    fg.add_argument("--check", choices=("sigma", "diagram", "growth"),
                    default="sigma")
    fg.add_argument("--t", type=float, default=1.0)
    _add_common(fg)
    return parser


def _config_from_args(args: argparse.Namespace,
                      experiment: str) -> ExperimentConfig:
    overrides = {
        "seed": args.seed,
        "corpus_size": args.corpus_size,
        "dims": _parse_dims(args.dims) if args.dims else None,
        "r_min": args.r_min,
        "r_max": args.r_max,
        "epsilon": args.epsilon,
        "phi_alpha": args.phi_alpha,
        "depth": args.depth,
        "max_len": args.max_len,
        "t_values": _parse_floats(args.t_values)
        if getattr(args, "t_values", None) else None,
        "tolerances": _parse_tolerances(args.tolerance)
        if args.tolerance else None,
        "output": args.output,
        "figures": False if args.no_figures else None,
    }
    if args.config:
        cfg = load_config(args.config)
        if cfg.experiment != experiment:
            cfg = override(cfg, experiment=experiment)
    elif experiment == "tail_divergence":
        # dims are the scanned vector lengths here, so the matrix-algebra
        # default (4, 8, 16) would be a trivial run
        cfg = ExperimentConfig(experiment=experiment,
                               dims=(1024, 4096, 16384))
    else:
        cfg = ExperimentConfig(experiment=experiment)
    return override(cfg, **overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list:
        for name in sorted(EXPERIMENTS):
            print(f"{name:24s} {EXPERIMENTS[name]}")
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2

    try:
        if args.command == "freegroup":
            experiment = ("freegroup_diagram" if args.check == "diagram"
                          else "freegroup_sigma")
            cfg = _config_from_args(args, experiment)
            if args.check == "diagram" and not getattr(args, "t_values", None):
                cfg = override(cfg, t_values=(args.t,))
            if args.check == "growth":
                cfg = override(cfg, max_len=min(cfg.max_len, 10))
        else:
            cfg = _config_from_args(args, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    from ncmaxlab.harness.experiments import run_experiment
    from ncmaxlab.harness.report import write_report

    result = run_experiment(cfg)
    paths = write_report(cfg, result)
    summary = result.summary
    print(f"{cfg.experiment}: {summary['pass_count']} passed, "
          f"{summary['fail_count']} failed -> {paths['csv']}")
    return result.status


if __name__ == "__main__":
    sys.exit(main())
