"""Command-line front end for the experiment harness.

Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
All randomness flows from --seed (when given) or the config master seed.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter

from .experiments import (ConfigError, DegenerateFitError, fit_rate,
                          load_config_file, read_records, records_to_csv,
                          run_coverage, run_experiment, with_master_seed,
                          write_records)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; the harness contract wants 1.
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


_SUBCOMMAND_KIND = {
    "regress": "regression",
    "manifold": "regression",
    "levelset": "levelset",
    "maxima": "maxima",
    "coverage": "coverage",
    "setcount": "setcount",
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="knnrates",
                     description="k-NN regression rate experiments")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in _SUBCOMMAND_KIND:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config master seed")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--format", default="csv", help="output format")
        p.add_argument("--quiet", action="store_true",
                       help="suppress informational output")
    fit = sub.add_parser("fit", help="fit a log-log rate to a records CSV")
    fit.add_argument("records", help="records CSV produced by an experiment")
    fit.add_argument("--quantity", default=None,
                     help="quantity column to fit (default: most common)")
    fit.add_argument("--out", default=None, help="output CSV path")
    fit.add_argument("--format", default="csv", help="output format")
    fit.add_argument("--quiet", action="store_true")
    return parser


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _run_fit(args) -> int:
    records = read_records(args.records)
    quantity = args.quantity
    if quantity is None:
        if not records:
            raise DegenerateFitError("records file is empty")
        quantity = Counter(r.quantity for r in records).most_common(1)[0][0]
    fit = fit_rate(records, quantity)
    lines = ["quantity,slope,intercept,residual_rms,slope_stderr,rungs",
             f"{quantity},{fit.slope:.17g},{fit.intercept:.17g},"
             f"{fit.residual_rms:.17g},{fit.slope_stderr:.17g},{fit.rungs}"]
    _emit("\n".join(lines) + "\n", args.out)
    if not args.quiet:
        print(f"{quantity}: slope {fit.slope:+.4f} over {fit.rungs} rungs "
              f"(residual rms {fit.residual_rms:.3g})", file=sys.stderr)
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except SystemExit as e:  # --help
        return 0 if e.code in (0, None) else 1

    if args.command is None:
        print(parser.format_usage(), file=sys.stderr)
        return 1

    try:
        if args.format != "csv":
            raise ConfigError(f"--format: unsupported format {args.format!r}")
        if args.command == "fit":
            return _run_fit(args)

        cfg = load_config_file(args.config)
        expected = _SUBCOMMAND_KIND[args.command]
        if cfg.kind != expected:
            raise ConfigError(
                f"experiment.kind: config declares {cfg.kind!r} but the "
                f"{args.command!r} subcommand expects {expected!r}")
        if args.command == "manifold" and cfg.manifold is None:
            raise ConfigError("manifold.kind: required for the manifold "
                              "subcommand")
        if args.seed is not None:
            cfg = with_master_seed(cfg, args.seed)

        if cfg.kind == "coverage":
            result = run_coverage(cfg)
            records = result.records
            if not args.quiet:
                print(f"coverage={result.coverage:.4f} "
                      f"radius_coverage={result.radius_coverage:.4f} "
                      f"sup_violations={list(result.sup_violations)} "
                      f"radius_violations={list(result.radius_violations)}",
                      file=sys.stderr)
        else:
            records = run_experiment(cfg)

        out_path = args.out if args.out is not None else cfg.out_path
        if out_path is None:
            sys.stdout.write(records_to_csv(records))
        else:
            write_records(out_path, records)
        if not args.quiet:
            total_ms = sum(r.ms for r in records)
            print(f"{args.command}: {len(records)} records in ~{total_ms} ms",
                  file=sys.stderr)
        return 0
    except (ConfigError, DegenerateFitError, FileNotFoundError) as e:
        print(f"knnrates {args.command}: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # runtime failure
        print(f"knnrates {args.command}: runtime failure: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
