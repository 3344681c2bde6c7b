"""Command-line front end.

Subcommands::

    spinor-gpe run      --config FILE
    spinor-gpe converge --config FILE --mode temporal|spatial --ladder LIST
    spinor-gpe bench    [--dim 2|3] [--sizes LIST] [--scheme ts2|ts4] [--steps K]
    spinor-gpe verify   [--draws K]

Exit codes: 0 success, 2 configuration error, 3 numerical-consistency
error (including a failed verify battery), 4 I/O or snapshot-format error.
The environment variable SPINOR_THREADS caps FFT worker threads
(default 1).
"""

from __future__ import annotations

import argparse
import sys

from .config import parse_config
from .errors import ConfigError, NumericalConsistencyError, SnapshotFormatError
from . import harness

__all__ = ["main"]


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad ladder list {text!r}: {exc}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad size list {text!r}: {exc}") from None


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    result = harness.run_simulation(config)
    last = result.records[-1]
    print(f"steps: {config.n_steps()}  t: {last.t!r}")
    print(f"mass: {last.mass!r}  energy: {last.energy!r}")
    print(f"wrote {result.csv_path} ({len(result.records)} rows, "
          f"{len(result.snapshot_paths)} snapshots)")
    return 0


def _cmd_converge(args) -> int:
    config = parse_config(args.config)
    ladder = _float_list(args.ladder)
    if args.mode == "temporal":
        report = harness.temporal_ladder(config, ladder,
                                         ref_tau=args.ref_tau)
    else:
        report = harness.spatial_ladder(config, ladder, ref_h=args.ref_h)
    print(report.format())
    return 0


def _cmd_bench(args) -> int:
    report = harness.bench(dim=args.dim, sizes=_int_list(args.sizes),
                           scheme=args.scheme, steps=args.steps)
    print(report.format())
    if args.ratio:
        ratio = harness.scheme_time_ratio(dim=args.dim, steps=args.steps)
        print(f"ts4/ts2 time ratio at N=128: {ratio:.2f}")
    return 0


def _cmd_verify(args) -> int:
    results = harness.verify_suite(draws=args.draws)
    for check in results:
        print(check.format())
    failed = [c for c in results if not c.passed]
    if failed:
        raise NumericalConsistencyError(
            f"{len(failed)} of {len(results)} conformance checks failed")
    print(f"all {len(results)} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinor-gpe",
        description="Spectral split-step solver for rotating, spin-orbit-"
                    "coupled five-component condensates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configured trajectory")
    p_run.add_argument("--config", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_conv = sub.add_parser("converge", help="temporal or spatial error ladder")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--mode", choices=("temporal", "spatial"),
                        required=True)
    p_conv.add_argument("--ladder", required=True,
                        help="comma-separated tau values (temporal) or "
                             "h values (spatial)")
    p_conv.add_argument("--ref-tau", type=float, default=None,
                        help="reference step size (temporal mode)")
    p_conv.add_argument("--ref-h", type=float, default=None,
                        help="reference spacing (spatial mode)")
    p_conv.set_defaults(func=_cmd_converge)

    p_bench = sub.add_parser("bench", help="timing ladder and scaling fit")
    p_bench.add_argument("--dim", type=int, choices=(2, 3), default=2)
    p_bench.add_argument("--sizes", default="64,128,192,256")
    p_bench.add_argument("--scheme", choices=("ts2", "ts4"), default="ts2")
    p_bench.add_argument("--steps", type=int, default=20)
    p_bench.add_argument("--ratio", action="store_true",
                         help="also report the ts4/ts2 time ratio")
    p_bench.set_defaults(func=_cmd_bench)

    p_verify = sub.add_parser("verify", help="oracle conformance battery")
    p_verify.add_argument("--draws", type=int, default=400)
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalConsistencyError as exc:
        print(f"numerical-consistency error: {exc}", file=sys.stderr)
        return 3
    except SnapshotFormatError as exc:
        print(f"snapshot error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
