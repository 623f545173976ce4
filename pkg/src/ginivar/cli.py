"""Command-line interface.

Subcommands::

    ginivar test     --input x.csv [--column C] [--s 0.7 --q 0.5 --alpha 0.05]
                     [--pre diff|sdiff:52|drop:1,2,3]... [--format json|csv]
                     [--out report.json] [--plot fig.png]
    ginivar locate   same flags as test, plus --margin
    ginivar lrv      --input x.csv [--column C] [--s --q] [--pre ...] ...
    ginivar simulate --scenario cfg.json --out x.csv [--seed S] [--plot fig.png]
    ginivar mc       --spec cfg.json [--threads T] [--seed S]
                     [--out report.json] [--format json|csv] [--plot fig.png]

Exit codes: 0 success, 2 input/configuration error, 3 statistical error
(degenerate block, sample too short, constant input).

Preprocessing steps (``--pre``, repeatable, applied in order): ``diff``
(first differences), ``sdiff:LAG`` (differences at the given lag) and
``drop:I,J,...`` (remove the given 1-based positions, e.g. calendar
artifacts, before differencing).

Config files are JSON.  A scenario file holds ``{"noise": {...}, "mean":
{...}, "variance": {...}, "n": ..., "seed": ...}``; an experiment file
holds one cell ``{"mode": ..., "noise": ..., "n": ..., "replications":
..., "base_seed": ..., ...}`` or ``{"experiments": [...]}`` with several.
The key-by-key schema is documented in the README.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import changepoint, montecarlo, plots, reports
from .dgp import generate_sample, scenario_from_dict, scenario_to_dict
from .errors import EstimationError, GinivarError
from .lrv import estimate_kappa
from .series import TimeSeries, difference, drop_indices, seasonal_difference
from .vartest import run_test
from .version import SCHEMA_VERSION, __version__

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_STATS = 3


def _add_common_io(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV file with the series")
    p.add_argument(
        "--column",
        default=None,
        help="column name or 1-based index (default: first column)",
    )
    p.add_argument(
        "--pre",
        action="append",
        default=[],
        metavar="STEP",
        help="preprocessing step: diff, sdiff:LAG or drop:I,J,... (repeatable, in order)",
    )


def _add_tuning(p: argparse.ArgumentParser, with_alpha: bool = True) -> None:
    p.add_argument("--s", type=float, default=0.7, help="block exponent (default 0.7)")
    p.add_argument("--q", type=float, default=0.5, help="sub-block exponent (default 0.5)")
    if with_alpha:
        p.add_argument("--alpha", type=float, default=0.05, help="significance level")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help="write the report here (default: stdout)")
    p.add_argument("--plot", default=None, metavar="PNG", help="render a figure to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginivar",
        description="Variance-constancy testing and change-point localization "
        "via Gini's mean difference of log local variances.",
    )
    parser.add_argument("--version", action="version", version=f"ginivar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="test the hypothesis of constant variance")
    _add_common_io(p_test)
    _add_tuning(p_test)
    _add_output(p_test)

    p_loc = sub.add_parser("locate", help="locate variance change points recursively")
    _add_common_io(p_loc)
    _add_tuning(p_loc)
    p_loc.add_argument(
        "--margin",
        type=int,
        default=None,
        help="boundary exclusion of the refinement window (default: max(10, 5%% of window))",
    )
    _add_output(p_loc)

    p_lrv = sub.add_parser("lrv", help="estimate the long-run variance normalizer")
    _add_common_io(p_lrv)
    _add_tuning(p_lrv, with_alpha=False)
    _add_output(p_lrv)

    p_sim = sub.add_parser("simulate", help="draw a sample from a scenario config")
    p_sim.add_argument("--scenario", required=True, help="JSON scenario config")
    p_sim.add_argument("--out", required=True, help="CSV file to write")
    p_sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sim.add_argument("--plot", default=None, metavar="PNG")

    p_mc = sub.add_parser("mc", help="run Monte Carlo experiments from a config")
    p_mc.add_argument("--spec", required=True, help="JSON experiment config")
    p_mc.add_argument("--threads", type=int, default=None, help="workers (default: all cores)")
    p_mc.add_argument("--seed", type=int, default=None, help="override base_seed for all cells")
    _add_output(p_mc)

    return parser


def _apply_preprocessing(x: TimeSeries, steps: list[str]) -> TimeSeries:
    for step in steps:
        if step == "none":
            continue
        if step == "diff":
            x = difference(x)
        elif step.startswith("sdiff:"):
            x = seasonal_difference(x, int(step.split(":", 1)[1]))
        elif step.startswith("drop:"):
            idx = [int(tok) for tok in step.split(":", 1)[1].split(",") if tok]
            x = drop_indices(x, idx)
        else:
            raise ValueError(f"unknown preprocessing step {step!r}")
    return x


def _load_series(args) -> TimeSeries:
    column = args.column
    if column is not None and column.isdigit():
        column = int(column)
    x = reports.ingest_csv(args.input, column)
    return _apply_preprocessing(x, args.pre)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _companion_path(out: str, suffix: str) -> str:
    p = Path(out)
    return str(p.with_name(p.stem + suffix))


def _config_echo(args, **extra) -> dict:
    echo = {
        "command": args.command,
        "input": getattr(args, "input", None),
        "column": getattr(args, "column", None),
        "pre": list(getattr(args, "pre", [])),
        "s": getattr(args, "s", None),
        "q": getattr(args, "q", None),
        "alpha": getattr(args, "alpha", None),
    }
    echo.update(extra)
    return echo


def _cmd_test(args) -> int:
    x = _load_series(args)
    result = run_test(x, s=args.s, q=args.q, alpha=args.alpha)
    if args.format == "json":
        _write(reports.to_json(reports.test_result_to_dict(result, _config_echo(args))), args.out)
    else:
        _write(reports.test_result_to_csv(result), args.out)
    if args.out:
        _write(reports.block_stats_csv(result), _companion_path(args.out, "_blocks.csv"))
        _write(reports.series_csv(x), _companion_path(args.out, "_series.csv"))
    if args.plot:
        plots.render_test_result(x, result, args.plot)
    return EXIT_OK


def _cmd_locate(args) -> int:
    x = _load_series(args)
    cps = changepoint.locate_all(x, s=args.s, q=args.q, alpha=args.alpha, margin=args.margin)
    echo = _config_echo(args, margin=args.margin)
    if args.format == "json":
        _write(reports.to_json(reports.changepoints_to_dict(cps, echo)), args.out)
    else:
        _write(reports.changepoints_to_csv(cps), args.out)
    if args.out:
        _write(reports.series_csv(x), _companion_path(args.out, "_series.csv"))
    if args.plot:
        plots.render_changepoints(x, cps, args.plot)
    return EXIT_OK


def _cmd_lrv(args) -> int:
    x = _load_series(args)
    est = estimate_kappa(x, s=args.s, q=args.q)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "tool": "ginivar",
        "version": __version__,
        "kind": "lrv",
        "config": _config_echo(args),
        "n": x.n,
        "kappa_hat": est.kappa_hat,
        "sigma_h_sq": est.sigma_h_sq,
        "lrv_ell": est.sub_partition.block_len,
        "lrv_b": est.sub_partition.block_count,
    }
    if args.format == "json":
        _write(reports.to_json(payload), args.out)
    else:
        header = ["n", "kappa_hat", "sigma_h_sq", "lrv_ell", "lrv_b"]
        row = ",".join(
            repr(payload[k]) if isinstance(payload[k], float) else str(payload[k])
            for k in header
        )
        _write(",".join(header) + "\n" + row, args.out)
    if args.plot:
        plots.render_series(x, args.plot, title=f"kappa_hat = {est.kappa_hat:.4f}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    if args.seed is not None:
        cfg["seed"] = args.seed
    spec = scenario_from_dict(cfg)
    x = generate_sample(spec)
    _write(reports.series_csv(x), args.out)
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "tool": "ginivar",
        "version": __version__,
        "kind": "scenario",
        "scenario": scenario_to_dict(spec),
    }
    _write(reports.to_json(sidecar), _companion_path(args.out, "_scenario.json"))
    if args.plot:
        plots.render_series(x, args.plot, title=spec.noise.label())
    return EXIT_OK


def _cmd_mc(args) -> int:
    cfg = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    cells = cfg["experiments"] if isinstance(cfg, dict) and "experiments" in cfg else [cfg]
    results = []
    for cell in cells:
        if args.seed is not None:
            cell = dict(cell, base_seed=args.seed)
        spec = montecarlo.experiment_from_dict(cell)
        results.append(montecarlo.run_experiment(spec, threads=args.threads))
    if args.format == "json":
        echo = {"spec": args.spec, "threads": args.threads, "seed": args.seed}
        _write(reports.to_json(reports.experiment_report_to_dict(results, echo)), args.out)
    else:
        _write(reports.experiment_reports_to_csv(results), args.out)
    if args.out:
        # human-oriented companion table for side-by-side comparisons
        _write(montecarlo.format_table(results), _companion_path(args.out, "_table.txt"))
    if args.plot:
        plots.render_experiments(results, args.plot)
    return EXIT_OK


_COMMANDS = {
    "test": _cmd_test,
    "locate": _cmd_locate,
    "lrv": _cmd_lrv,
    "simulate": _cmd_simulate,
    "mc": _cmd_mc,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except EstimationError as exc:
        print(f"ginivar: {exc}", file=sys.stderr)
        return EXIT_STATS
    except (GinivarError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"ginivar: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
