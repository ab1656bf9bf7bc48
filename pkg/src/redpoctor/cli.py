"""Command-line driver: ``python3 -m redpoctor {gen,run,compare,sweep}``.

Exit codes: 0 success, 1 usage or configuration error, 2 bad input data or
unwritable output, 3 budget invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .baselines import BASELINES, run_baseline
from .config import ALIASES, apply_overrides, load_config
from .core import StreamPrefix
from .errors import ConfigError, ShapeMismatch, StreamError, UnknownBaseline, WindowBudgetExceeded
from .io import emit_report, ensure_dir, parse_stream_csv, write_json, write_stream_csv, write_sweep_dat
from .pipeline import PipelineConfig, run_stream
from .synthetic import PROFILES, generate_synthetic

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3
SEED_ENV = "REDPOCTOR_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


def env_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _csv_list(text: str) -> List[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _axis(text: str) -> Tuple[str, List[str]]:
    if "=" not in text:
        raise argparse.ArgumentTypeError("axis must look like name=v1,v2,...")
    name, values = text.split("=", 1)
    return ALIASES.get(name.strip(), name.strip()), _csv_list(values)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="redpoctor", description="Private release of daily heart-rate histograms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="write a synthetic stream CSV")
    gen.add_argument("--profile", choices=PROFILES, default="mixed")
    gen.add_argument("--days", type=int, default=90)
    gen.add_argument("--bins", type=int, default=144, help="bins per day")
    gen.add_argument("--bin-width", type=int, default=10, help="minutes per bin")
    gen.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    gen.add_argument("-o", "--output", required=True)

    def common(p, needs_output=True):
        p.add_argument("-c", "--config", help="flat key = value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        p.add_argument("-i", "--input", required=True, help="stream CSV")
        p.add_argument("--bin-width", type=int, default=10, help="minutes per bin of the input")
        p.add_argument("--seed", type=int, default=None, help=f"noise seed (default: config, then ${SEED_ENV})")
        p.add_argument("-o", "--output", required=needs_output, help="output directory")

    run = sub.add_parser("run", help="release a stream and score it")
    common(run)

    cmp_ = sub.add_parser("compare", help="run alongside baselines")
    common(cmp_)
    cmp_.add_argument("--baselines", type=_csv_list, default=list(BASELINES))

    sweep = sub.add_parser("sweep", help="average errors over seeds along one config axis")
    common(sweep)
    sweep.add_argument("--axis", type=_axis, required=True, help="e.g. epsilon=0.1,0.5,1,3 or w=7,14,28")
    sweep.add_argument("--seeds", type=int, default=1, help="seeds per point, counting up from the base seed")
    sweep.add_argument("--baselines", type=_csv_list, default=[])
    sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _config(args) -> PipelineConfig:
    config = load_config(args.config, args.set, base=PipelineConfig(seed=env_seed()))
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def _load_stream(args) -> StreamPrefix:
    return parse_stream_csv(args.input, args.bin_width)


def _summary_line(name: str, report) -> str:
    return f"{name:<14} days={report.days:<6d} mae={report.mae:.4f} mre={report.mre:.4f}"


def cmd_gen(args) -> int:
    if args.days < 1:
        raise UsageError("--days must be >= 1")
    if args.bins < 1 or args.bin_width < 1:
        raise UsageError("--bins and --bin-width must be >= 1")
    seed = env_seed() if args.seed is None else args.seed
    stream = generate_synthetic(seed, args.days, args.profile, args.bins, args.bin_width)
    out = Path(args.output)
    if out.parent != Path(""):
        ensure_dir(out.parent)
    write_stream_csv(stream, out)
    print(f"wrote {args.days} days x {args.bins} bins ({args.profile}, seed {seed}) to {out}")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    stream = _load_stream(args)
    records, report = run_stream(config, stream)
    emit_report(report, records, args.output, config)
    print(_summary_line("redpoctor", report))
    return EXIT_OK


def _run_named(name: str, config: PipelineConfig, stream: StreamPrefix):
    if name == "redpoctor":
        return run_stream(config, stream)
    return run_baseline(name, config, stream)


def cmd_compare(args) -> int:
    config = _config(args)
    for name in args.baselines:
        if name not in BASELINES:
            raise UsageError(f"unknown baseline {name!r}; choose from {', '.join(BASELINES)}")
    stream = _load_stream(args)
    out = ensure_dir(args.output)
    summary = {}
    for name in ["redpoctor", *args.baselines]:
        records, report = _run_named(name, config, stream)
        emit_report(report, records, out / name, config, extra={"method": name})
        summary[name] = {
            "mae": report.mae,
            "mre": report.mre,
            "mae_unfiltered": report.mae_unfiltered,
            "mre_unfiltered": report.mre_unfiltered,
            "samples": len(report.sample_days),
        }
        print(_summary_line(name, report))
    write_json({"seed": config.seed, "methods": summary}, out / "summary.json")
    return EXIT_OK


def _sweep_point(job):
    """One (method, axis value, seed) run; module-level so worker processes can pickle it."""
    name, config, stream = job
    records, report = _run_named(name, config, stream)
    return records, report


def cmd_sweep(args) -> int:
    key, values = args.axis
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    for name in args.baselines:
        if name not in BASELINES:
            raise UsageError(f"unknown baseline {name!r}; choose from {', '.join(BASELINES)}")
    base = _config(args)
    points = []
    for text in values:
        cfg = apply_overrides(base, [(key, text)])
        try:
            x = float(text)
        except ValueError:
            raise UsageError(f"sweep values must be numeric, got {text!r}") from None
        points.append((text, x, cfg))
    stream = _load_stream(args)
    out = ensure_dir(args.output)
    methods = ["redpoctor", *args.baselines]
    seeds = [base.seed + k for k in range(args.seeds)]
    jobs = [
        (name, dataclasses.replace(cfg, seed=s), stream)
        for name in methods
        for _, _, cfg in points
        for s in seeds
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]

    it = iter(results)
    label = key.replace(".", "_")
    for name in methods:
        rows = []
        for text, x, cfg in points:
            runs = [next(it) for _ in seeds]
            maes = [r.mae for _, r in runs]
            mres = [r.mre for _, r in runs]
            rows.append((x, float(np.mean(maes)), float(np.mean(mres))))
            point_dir = out / f"{label}={text}" if name == "redpoctor" else out / f"{label}={text}" / name
            first_records, first_report = runs[0]
            emit_report(
                first_report,
                first_records,
                point_dir,
                dataclasses.replace(cfg, seed=seeds[0]),
                extra={
                    "method": name,
                    "seeds": seeds,
                    "mae_per_seed": maes,
                    "mre_per_seed": mres,
                    "mae_mean": rows[-1][1],
                    "mre_mean": rows[-1][2],
                },
            )
            print(f"{name:<14} {key}={text:<8} mae={rows[-1][1]:.4f} mre={rows[-1][2]:.4f}")
        dat = "sweep.dat" if name == "redpoctor" else f"sweep_{name}.dat"
        write_sweep_dat(rows, out / dat, label)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "compare": cmd_compare, "sweep": cmd_sweep}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, UnknownBaseline) as exc:
        print(f"redpoctor: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WindowBudgetExceeded as exc:
        print(f"redpoctor: budget invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (StreamError, ShapeMismatch, ValueError, OSError) as exc:
        print(f"redpoctor: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
