"""Command line front end: run sweeps, summarize results, drive the oracle.

Exit codes: 0 on success, 1 for configuration errors, 2 for internal faults.
"""

from __future__ import annotations

import argparse
import os
import sys

from .backoff import POLICY_KEYS, BackoffParams, policy_from_name
from .kernel import KernelError
from .microsim import MicroConfig, run_micro
from .runner import (ReportRow, render_summary, run_sweep, summarize_best_worst,
                     write_csv)
from .scenario import (RANGE_SWEEP_DEFAULT, SPEED_SWEEP_DEFAULT, ConfigError,
                       SweepSpec, load_scenario)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manetsim",
        description="802.11 DCF backoff-algorithm comparison in mobile ad hoc networks")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a sweep and write raw.csv/aggregate.csv/summary.txt")
    run_p.add_argument("--config", help="scenario file with key = value lines")
    run_p.add_argument("--algorithm", action="append", choices=POLICY_KEYS,
                       help="algorithm to include (repeatable; default: all six)")
    run_p.add_argument("--axis", choices=["speed", "range"], default="speed")
    run_p.add_argument("--values", help="comma-separated axis values")
    run_p.add_argument("--seeds", help="comma-separated seeds (overrides config)")
    run_p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any scenario field (repeatable)")
    run_p.add_argument("--out", default=".", help="output directory")
    run_p.add_argument("--quiet", action="store_true", help="suppress per-run progress")

    sum_p = sub.add_parser("summarize", help="best/worst table from an aggregate CSV")
    sum_p.add_argument("--in", dest="input", required=True, help="aggregate.csv path")
    sum_p.add_argument("--out", help="write the table here instead of stdout")

    micro_p = sub.add_parser("micro", help="slot-level saturated-contention oracle")
    micro_p.add_argument("--policy", choices=POLICY_KEYS, required=True)
    micro_p.add_argument("--stations", type=int, default=2)
    micro_p.add_argument("--horizon", type=int, default=1_000_000, help="slots to simulate")
    micro_p.add_argument("--seed", type=int, default=1)
    micro_p.add_argument("--cw-min", type=int, default=32)
    micro_p.add_argument("--cw-max", type=int, default=1024)
    return parser


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad numeric list: {text!r}")


def _cmd_run(args: argparse.Namespace) -> int:
    overrides: dict[str, str] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seeds:
        overrides["seeds"] = args.seeds
    base = load_scenario(args.config, overrides)

    defaults = SPEED_SWEEP_DEFAULT if args.axis == "speed" else RANGE_SWEEP_DEFAULT
    values = _parse_floats(args.values) if args.values else list(defaults)
    spec = SweepSpec(axis=args.axis, values=values,
                     algorithms=args.algorithm or list(POLICY_KEYS))

    progress = None
    if not args.quiet:
        def progress(row: ReportRow) -> None:
            delay = "-" if row.avg_delay_us is None else f"{row.avg_delay_us / 1000:.2f}ms"
            print(f"{row.algorithm} {row.axis}={row.axis_value:g} seed={row.seed} "
                  f"pdr={row.pdr:.4f} delay={delay}")

    raw_rows, agg_rows = run_sweep(spec, base, progress=progress)
    os.makedirs(args.out, exist_ok=True)
    write_csv(raw_rows, os.path.join(args.out, "raw.csv"))
    write_csv(agg_rows, os.path.join(args.out, "aggregate.csv"))
    summary = render_summary(summarize_best_worst(agg_rows))
    with open(os.path.join(args.out, "summary.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(summary)
    if not args.quiet:
        print(summary, end="")
    return 0


def _read_rows(path: str) -> list[ReportRow]:
    rows: list[ReportRow] = []
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            expected = ("algorithm,axis,axis_value,sdps,seed,pdr,avg_delay_us,"
                        "generated,delivered,dropped_queue,dropped_mac,dropped_no_route")
            if header != expected:
                raise ConfigError(f"{path}: unexpected CSV header")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 12:
                    raise ConfigError(f"{path}: malformed row {line!r}")
                rows.append(ReportRow(
                    algorithm=parts[0], axis=parts[1], axis_value=float(parts[2]),
                    sdps=int(parts[3]), seed=parts[4], pdr=float(parts[5]),
                    avg_delay_us=float(parts[6]) if parts[6] else None,
                    generated=int(parts[7]), delivered=int(parts[8]),
                    dropped_queue=int(parts[9]), dropped_mac=int(parts[10]),
                    dropped_no_route=int(parts[11])))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    return rows


def _cmd_summarize(args: argparse.Namespace) -> int:
    rows = [r for r in _read_rows(args.input) if r.seed == "avg"] or _read_rows(args.input)
    text = render_summary(summarize_best_worst(rows))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def _cmd_micro(args: argparse.Namespace) -> int:
    try:
        params = BackoffParams(cw_min=args.cw_min, cw_max=args.cw_max)
        params.validate()
        cfg = MicroConfig(policy=policy_from_name(args.policy), stations=args.stations,
                          horizon_slots=args.horizon, seed=args.seed, params=params)
        result = run_micro(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc))
    print(f"policy={args.policy} stations={args.stations} horizon={args.horizon} seed={args.seed}")
    print(f"idle_slots={result.idle_slots} success_slots={result.success_slots} "
          f"collision_slots={result.collision_slots}")
    for i in range(args.stations):
        print(f"station{i}: successes={result.successes[i]} collisions={result.collisions[i]}")
    print(f"success_fraction={result.success_fraction():.6f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "summarize":
            return _cmd_summarize(args)
        return _cmd_micro(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except KernelError as exc:
        print(f"internal fault: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
