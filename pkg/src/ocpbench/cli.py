"""Command-line harness: single runs, benchmark tables, frontier sweeps, verification.

Subcommands
-----------
run     one (predictor, alpha, seed) cell -> trace.csv + report.json [+ figure]
bench   several predictors at one alpha   -> bench.csv + bench.json  [+ figure]
pareto  predictors x alpha grid x seeds   -> pareto.csv + tracking.csv [+ figures]
verify  the full bound/identity battery   -> verdict lines, exit 4 on any FAIL

Exit codes: 0 success, 1 usage error, 2 parse error (CSV/config), 3 I/O
error, 4 verification failure.  ``--out -`` streams the primary delimited
artifact to stdout (diagnostics go to stderr, figures are skipped).

Infinities are serialized as the literal ``inf`` in CSV; JSON uses
``{"value": null, "infinite": true}`` objects for any field that can be
infinite.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .generators import (
    CsvFormatError,
    IidConfig,
    QuadraticMixConfig,
    SinusoidConfig,
    StationaryConfig,
    gen_iid,
    gen_quadratic_mix,
    gen_sinusoid,
    gen_stationary,
    ingest_csv,
)
from .bounds import BoundVerdict
from .metrics import SIZE_STATS, compute_metrics, pareto_frontier, target_tracking
from .pinball import Trace
from .predictors import AlphaCorrected, make_predictor, run_predictor
from .verify import run_battery, single_run_checks

SCHEMA_VERSION = 1
TRACKING_BAND = 0.03


class UsageError(ValueError):
    """Bad command line: unknown names, malformed specs, invalid combinations."""


class ConfigError(ValueError):
    """Malformed config file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse's own complaints to exit code 1
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Spec parsing


def parse_kv_spec(spec: str, what: str) -> tuple[str, dict]:
    """Parse ``name`` or ``name:key=val,key=val`` mini-specs."""
    name, _, tail = spec.partition(":")
    name = name.strip().lower()
    if not name:
        raise UsageError(f"empty {what} spec {spec!r}")
    params: dict[str, str] = {}
    if tail:
        for item in tail.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"malformed {what} parameter {item!r} in {spec!r}")
            params[key.strip().lower()] = value.strip()
    return name, params


def parse_seeds(text: str) -> list[int]:
    """Seed lists: ``1,2,5`` or ranges ``1..10``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse seeds {text!r}") from None
    if not seeds:
        raise UsageError(f"empty seed list {text!r}")
    return seeds


def parse_alpha_grid(text: str) -> list[float]:
    """Grid spec ``N:LO:HI`` -> N uniform target levels on [LO, HI]."""
    try:
        n_str, lo_str, hi_str = text.split(":")
        n, lo, hi = int(n_str), float(lo_str), float(hi_str)
    except ValueError:
        raise UsageError(f"alpha grid must look like N:LO:HI, got {text!r}") from None
    if n < 1 or not (0.0 < lo <= hi < 1.0):
        raise UsageError(f"alpha grid out of range: {text!r}")
    return [float(a) for a in np.linspace(lo, hi, n)]


def _pop_float(params: dict, *names, default=None):
    for name in names:
        if name in params:
            return float(params.pop(name))
    return default


def generator_exponent(source: str, csv_path: str | None) -> float:
    """Natural growth exponent of a source, for envelope fitting in reports."""
    if csv_path is not None:
        return 0.0
    name, _ = parse_kv_spec(source, "generator")
    return 2.0 if name == "quadratic" else 0.0


def build_scores(source: str, csv_path: str | None, horizon: int, seed: int) -> np.ndarray:
    """Materialize the score stream for one cell."""
    if csv_path is not None:
        return ingest_csv(csv_path)
    name, params = parse_kv_spec(source, "generator")
    try:
        if name == "sinusoid":
            scores = gen_sinusoid(
                SinusoidConfig(
                    period=_pop_float(params, "period", default=200.0),
                    magnitude=_pop_float(params, "magnitude", "mag", default=10.0),
                    offset=_pop_float(params, "offset", default=2.0),
                    noise_sd=_pop_float(params, "noise_sd", "noise", default=0.3),
                    horizon=horizon,
                    seed=seed,
                )
            )
        elif name == "stationary":
            scores = gen_stationary(
                StationaryConfig(
                    baseline=_pop_float(params, "baseline", default=10.0),
                    spike_prob=_pop_float(params, "spike_prob", "p", default=0.1),
                    exp_scale=_pop_float(params, "exp_scale", "scale", default=10.0),
                    window=int(_pop_float(params, "window", default=25.0)),
                    horizon=horizon,
                    seed=seed,
                )
            )
        elif name == "quadratic":
            scores = gen_quadratic_mix(
                QuadraticMixConfig(
                    end_value=_pop_float(params, "end_value", "end", default=20.0),
                    spike_prob=_pop_float(params, "spike_prob", "p", default=0.1),
                    exp_scale=_pop_float(params, "exp_scale", "scale", default=10.0),
                    window=int(_pop_float(params, "window", default=25.0)),
                    horizon=horizon,
                    seed=seed,
                )
            )
        elif name == "iid":
            scores = gen_iid(
                IidConfig(
                    distribution=params.pop("dist", "uniform"),
                    scale=_pop_float(params, "scale", default=1.0),
                    horizon=horizon,
                    seed=seed,
                )
            )
        else:
            raise UsageError(
                f"unknown generator {name!r}; known: sinusoid, stationary, quadratic, iid"
            )
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if params:
        raise UsageError(f"unknown parameters for generator {name!r}: {sorted(params)}")
    return scores


def build_predictor(
    spec: str,
    alpha: float,
    horizon: int,
    alpha_correct: float | None = None,
    correct_sign: str = "down",
):
    """Build one calibrator from its mini-spec, optionally level-offset wrapped.

    Returns ``(label, predictor)``; the label identifies the cell in every
    output table.
    """
    name, raw_params = parse_kv_spec(spec, "predictor")
    params = {}
    for key, value in raw_params.items():
        try:
            params[key] = float(value)
        except ValueError:
            raise UsageError(
                f"non-numeric value for {key!r} in predictor spec {spec!r}"
            ) from None
    try:
        if alpha_correct is not None:
            predictor = AlphaCorrected(
                lambda eff: make_predictor(name, eff, horizon=horizon, **params),
                alpha,
                k=alpha_correct,
                horizon=horizon,
                raise_coverage=correct_sign == "down",
            )
            label = f"{spec}+ac{alpha_correct:g}"
        else:
            predictor = make_predictor(name, alpha, horizon=horizon, **params)
            label = spec
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return label, predictor


# ---------------------------------------------------------------------------
# Serialization


def fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def maybe_inf(x: float):
    """JSON encoding for fields that can be infinite."""
    if math.isinf(x):
        return {"value": None, "infinite": True}
    return {"value": float(x), "infinite": False}


def verdict_json(v: BoundVerdict) -> dict:
    return {
        "name": v.name,
        "observed": maybe_inf(v.observed),
        "bound": maybe_inf(v.bound),
        "holds": v.holds,
        "slack": maybe_inf(v.slack),
    }


def metrics_json(report) -> dict:
    return {
        "marginal_coverage": report.marginal_coverage,
        "miscov": report.miscov,
        "longest_error_run": report.longest_error_run,
        "rounds_used": report.rounds_used,
        "mean_size": maybe_inf(report.mean_size),
        "median_size": maybe_inf(report.median_size),
        "q75_size": maybe_inf(report.q75_size),
        "q90_size": maybe_inf(report.q90_size),
        "q95_size": maybe_inf(report.q95_size),
    }


def trace_csv_text(trace: Trace) -> str:
    fh = io.StringIO()
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "b", "score", "covered", "g", "wealth"])
    wealth = trace.wealth if trace.wealth is not None else [None] * len(trace)
    for out, w in zip(trace.outcomes, wealth):
        writer.writerow(
            [
                out.t,
                fmt_float(out.radius),
                fmt_float(out.score),
                int(out.covered),
                fmt_float(out.grad),
                "" if w is None else fmt_float(w),
            ]
        )
    return fh.getvalue()


class OutputSink:
    """Directory sink, or stdout when the output path is ``-``."""

    def __init__(self, out: str):
        self.to_stdout = out == "-"
        self.dir = None if self.to_stdout else Path(out)
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def write_text(self, filename: str, text: str, primary: bool = False) -> None:
        if self.to_stdout:
            if primary:
                sys.stdout.write(text)
            else:
                sys.stderr.write(text)
            return
        (self.dir / filename).write_text(text, encoding="utf-8")

    def figure_path(self, filename: str) -> str | None:
        return None if self.to_stdout else str(self.dir / filename)


# ---------------------------------------------------------------------------
# Grid execution


def _run_cell(cell):
    """Worker for one (predictor spec, alpha, seed) cell; returns (label, trace)."""
    spec, alpha, seed, source, csv_path, horizon, alpha_correct, correct_sign = cell
    scores = build_scores(source, csv_path, horizon, seed)
    label, predictor = build_predictor(spec, alpha, len(scores), alpha_correct, correct_sign)
    return label, run_predictor(predictor, scores)


def run_grid(cells, jobs: int):
    """Evaluate cells, in input order; worker processes only when jobs > 1."""
    if jobs <= 1:
        return [_run_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_cell, cells, chunksize=1))


# ---------------------------------------------------------------------------
# Config file


CONFIG_KEYS = {
    "predictor",
    "alpha",
    "alpha_grid",
    "generator",
    "csv",
    "seed",
    "seeds",
    "horizon",
    "burn_in",
    "window",
    "stat",
    "out",
    "jobs",
    "figures",
    "alpha_correct",
    "alpha_correct_sign",
}


def load_config(path: str) -> dict:
    """Read a ``key = value`` config file; '#' starts a comment."""
    text = Path(path).read_text(encoding="utf-8")
    config: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep or not key or not value.strip():
            raise ConfigError(f"{path}: line {lineno}: expected 'key = value', got {raw!r}")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
        config[key] = value.strip()
    return config


def _merge(args, config: dict, key: str, cast, default):
    """Flag > config file > default."""
    value = getattr(args, key, None)
    if value is None and key in config:
        value = cast(config[key])
    if value is None:
        value = default
    setattr(args, key, value)
    return value


def _split_predictors(value) -> list[str]:
    if isinstance(value, str):
        return [s.strip() for s in value.split(",") if s.strip()]
    out = []
    for item in value:
        out.extend(s.strip() for s in item.split(",") if s.strip())
    return out


def resolve_common(args) -> dict:
    config = load_config(args.config) if getattr(args, "config", None) else {}
    _merge(args, config, "generator", str, "sinusoid")
    _merge(args, config, "csv", str, None)
    _merge(args, config, "horizon", int, 3000)
    _merge(args, config, "burn_in", int, 50)
    _merge(args, config, "window", int, 100)
    _merge(args, config, "out", str, "out")
    _merge(args, config, "jobs", int, 1)
    _merge(args, config, "alpha_correct", float, None)
    _merge(args, config, "alpha_correct_sign", str, "down")
    if getattr(args, "figures", None) is None and "figures" in config:
        args.figures = config["figures"].lower() not in ("0", "false", "no")
    if getattr(args, "figures", None) is None:
        args.figures = True
    if args.horizon < 1:
        raise UsageError(f"horizon must be >= 1, got {args.horizon}")
    if args.burn_in < 0:
        raise UsageError(f"burn-in must be >= 0, got {args.burn_in}")
    if args.alpha_correct_sign not in ("down", "up"):
        raise UsageError("alpha-correct-sign must be 'down' or 'up'")
    return config


def cells_for(args, specs, alphas, seeds):
    return [
        (spec, alpha, seed, args.generator, args.csv, args.horizon, args.alpha_correct, args.alpha_correct_sign)
        for spec in specs
        for alpha in alphas
        for seed in seeds
    ]


# ---------------------------------------------------------------------------
# Subcommands


def cmd_run(args) -> int:
    config = resolve_common(args)
    _merge(args, config, "alpha", float, 0.05)
    _merge(args, config, "seed", int, 1)
    predictor_specs = _split_predictors(args.predictor or config.get("predictor", "up"))
    if len(predictor_specs) != 1:
        raise UsageError("run takes exactly one --predictor")
    sink = OutputSink(args.out)
    scores = build_scores(args.generator, args.csv, args.horizon, args.seed)
    label, predictor = build_predictor(
        predictor_specs[0], args.alpha, len(scores), args.alpha_correct, args.alpha_correct_sign
    )
    trace = run_predictor(predictor, scores)
    report = compute_metrics(trace, args.burn_in, args.alpha)
    exponent = generator_exponent(args.generator, args.csv)
    verdicts = single_run_checks(predictor, trace, scores, args.alpha, exponent)
    sink.write_text("trace.csv", trace_csv_text(trace), primary=True)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "predictor": label,
        "alpha": args.alpha,
        "seed": args.seed,
        "source": args.csv if args.csv else args.generator,
        "horizon": len(trace),
        "burn_in": args.burn_in,
        "metrics": metrics_json(report),
        "bound_checks": [verdict_json(v) for v in verdicts],
    }
    sink.write_text("report.json", json.dumps(payload, indent=2) + "\n")
    if args.figures and not sink.to_stdout and args.window <= len(trace):
        from .figures import save_local_panels

        save_local_panels({label: trace}, args.alpha, args.window, sink.figure_path("local.png"))
    if not sink.to_stdout:
        print(f"wrote {sink.dir}/trace.csv and report.json", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    config = resolve_common(args)
    _merge(args, config, "alpha", float, 0.05)
    _merge(args, config, "seeds", str, "1..10")
    predictor_specs = _split_predictors(args.predictor or config.get("predictor", "up,kt"))
    if not predictor_specs:
        raise UsageError("bench needs at least one --predictor")
    seeds = parse_seeds(args.seeds) if isinstance(args.seeds, str) else args.seeds
    if args.csv is not None:
        seeds = seeds[:1]  # a CSV stream is identical across seeds
    sink = OutputSink(args.out)
    results = run_grid(cells_for(args, predictor_specs, [args.alpha], seeds), args.jobs)
    per_label: dict[str, list[Trace]] = {}
    for label, trace in results:
        per_label.setdefault(label, []).append(trace)

    fields = (
        "marginal_coverage",
        "longest_error_run",
        "mean_size",
        "median_size",
        "q75_size",
        "q90_size",
        "q95_size",
    )
    rows = []
    for label, traces in per_label.items():
        reports = [compute_metrics(t, args.burn_in, args.alpha) for t in traces]
        rows.append(
            {
                "predictor": label,
                "seeds": len(traces),
                **{
                    f: float(np.mean([getattr(r, f) for r in reports]))
                    for f in fields
                },
            }
        )
    fh = io.StringIO()
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["predictor", "seeds", *fields])
    for row in rows:
        writer.writerow(
            [row["predictor"], row["seeds"], *(fmt_float(row[f]) for f in fields)]
        )
    sink.write_text("bench.csv", fh.getvalue(), primary=True)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "alpha": args.alpha,
        "source": args.csv if args.csv else args.generator,
        "burn_in": args.burn_in,
        "rows": [
            {
                "predictor": row["predictor"],
                "seeds": row["seeds"],
                "marginal_coverage": row["marginal_coverage"],
                "longest_error_run": row["longest_error_run"],
                **{f: maybe_inf(row[f]) for f in fields[2:]},
            }
            for row in rows
        ],
    }
    sink.write_text("bench.json", json.dumps(payload, indent=2) + "\n")
    if args.figures and not sink.to_stdout:
        first_seed = {label: traces[0] for label, traces in per_label.items()}
        if all(args.window <= len(t) for t in first_seed.values()):
            from .figures import save_local_panels

            save_local_panels(
                first_seed, args.alpha, args.window, sink.figure_path("bench_local.png")
            )
    if not sink.to_stdout:
        print(f"wrote {sink.dir}/bench.csv and bench.json", file=sys.stderr)
    return 0


def cmd_pareto(args) -> int:
    config = resolve_common(args)
    _merge(args, config, "alpha_grid", str, "50:0.05:0.25")
    _merge(args, config, "seeds", str, "1..10")
    _merge(args, config, "stat", str, "mean")
    if args.stat not in SIZE_STATS:
        raise UsageError(f"stat must be one of {SIZE_STATS}, got {args.stat!r}")
    predictor_specs = _split_predictors(args.predictor or config.get("predictor", "up,kt"))
    alphas = parse_alpha_grid(args.alpha_grid) if isinstance(args.alpha_grid, str) else args.alpha_grid
    seeds = parse_seeds(args.seeds) if isinstance(args.seeds, str) else args.seeds
    if args.csv is not None:
        seeds = seeds[:1]
    sink = OutputSink(args.out)
    cells = cells_for(args, predictor_specs, alphas, seeds)
    results = run_grid(cells, args.jobs)
    runs = {
        (label, cell[1], cell[2]): trace
        for cell, (label, trace) in zip(cells, results)
    }
    points = pareto_frontier(runs, size_stat=args.stat, burn_in=args.burn_in)
    fh = io.StringIO()
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["predictor", "alpha", "coverage", "se_cov", "size", "se_size", "stat"])
    for p in points:
        writer.writerow(
            [
                p.predictor_id,
                fmt_float(p.target_alpha),
                fmt_float(p.realized_coverage),
                fmt_float(p.se_coverage),
                fmt_float(p.size_stat),
                fmt_float(p.se_size),
                args.stat,
            ]
        )
    sink.write_text("pareto.csv", fh.getvalue(), primary=True)
    tracking = target_tracking(runs, burn_in=args.burn_in, band=TRACKING_BAND)
    fh = io.StringIO()
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["predictor", "alpha", "target", "realized", "within_band"])
    for t in tracking:
        writer.writerow(
            [
                t.predictor_id,
                fmt_float(t.target_alpha),
                fmt_float(t.target_coverage),
                fmt_float(t.realized_coverage),
                int(t.within_band),
            ]
        )
    sink.write_text("tracking.csv", fh.getvalue())
    if args.figures and not sink.to_stdout:
        from .figures import save_pareto_figure, save_tracking_figure

        save_pareto_figure(points, args.stat, sink.figure_path(f"pareto_{args.stat}.png"))
        save_tracking_figure(tracking, TRACKING_BAND, sink.figure_path("tracking.png"))
    if not sink.to_stdout:
        print(f"wrote {sink.dir}/pareto.csv and tracking.csv", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    verdicts = run_battery(corrupt_grads=args.corrupt_grads)
    width = max(len(v.name) for v in verdicts)
    lines = []
    for v in verdicts:
        status = "PASS" if v.holds else "FAIL"
        lines.append(
            f"{v.name:<{width}}  observed={v.observed:.6g}  bound={v.bound:.6g}  {status}"
        )
    print("\n".join(lines))
    if args.out is not None:
        sink = OutputSink(args.out)
        fh = io.StringIO()
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "observed", "bound", "holds", "slack"])
        for v in verdicts:
            writer.writerow(
                [v.name, fmt_float(v.observed), fmt_float(v.bound), int(v.holds), fmt_float(v.slack)]
            )
        sink.write_text("verify.csv", fh.getvalue())
    return 0 if all(v.holds for v in verdicts) else 4


# ---------------------------------------------------------------------------
# Entry point


def _add_common(sub: argparse.ArgumentParser, seeds: bool) -> None:
    sub.add_argument("--config", help="key = value config file; flags override it")
    sub.add_argument("--predictor", action="append", help="predictor spec name[:k=v,...]; repeatable or comma-separated")
    sub.add_argument("--generator", help="generator spec name[:k=v,...] (default sinusoid)")
    sub.add_argument("--csv", help="read scores from a CSV (header t,score or t,y,yhat)")
    sub.add_argument("--horizon", type=int, help="rounds for synthetic sources (default 3000)")
    sub.add_argument("--burn-in", dest="burn_in", type=int, help="rounds discarded before metrics (default 50)")
    sub.add_argument("--window", type=int, help="rolling window for local series (default 100)")
    sub.add_argument("--out", help="output directory, or - for stdout (default out)")
    sub.add_argument("--jobs", type=int, help="parallel worker processes for grids (default 1)")
    sub.add_argument("--alpha-correct", dest="alpha_correct", type=float, help="offset the working level by k/sqrt(T)")
    sub.add_argument(
        "--alpha-correct-sign",
        dest="alpha_correct_sign",
        choices=("down", "up"),
        help="direction of the level offset (default down, i.e. raise coverage)",
    )
    figures = sub.add_mutually_exclusive_group()
    figures.add_argument("--figures", dest="figures", action="store_true", default=None, help="render PNG figures (default)")
    figures.add_argument("--no-figures", dest="figures", action="store_false", help="skip figure rendering")
    if seeds:
        sub.add_argument("--seeds", help="seed list 1,2,3 or range 1..10 (default 1..10)")
    else:
        sub.add_argument("--seed", type=int, help="seed for the synthetic source (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ocpbench", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="run one predictor/alpha/seed cell")
    _add_common(run_p, seeds=False)
    run_p.add_argument("--alpha", type=float, help="target miscoverage rate (default 0.05)")
    run_p.set_defaults(fn=cmd_run)

    bench_p = subs.add_parser("bench", help="compare predictors at one alpha")
    _add_common(bench_p, seeds=True)
    bench_p.add_argument("--alpha", type=float, help="target miscoverage rate (default 0.05)")
    bench_p.set_defaults(fn=cmd_bench)

    pareto_p = subs.add_parser("pareto", help="coverage/size frontier over an alpha grid")
    _add_common(pareto_p, seeds=True)
    pareto_p.add_argument("--alpha-grid", dest="alpha_grid", help="N:LO:HI (default 50:0.05:0.25)")
    pareto_p.add_argument("--stat", help="size statistic: mean, median or q75 (default mean)")
    pareto_p.set_defaults(fn=cmd_pareto)

    verify_p = subs.add_parser("verify", help="run the bound/identity battery")
    verify_p.add_argument("--out", default=None, help="also write verify.csv into this directory")
    verify_p.add_argument(
        "--corrupt-grads",
        dest="corrupt_grads",
        action="store_true",
        help="negative control: flip subgradient signs before the reward check",
    )
    verify_p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except (CsvFormatError, ConfigError) as exc:
        print(f"ocpbench: parse error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:  # UsageError and domain violations alike
        print(f"ocpbench: usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ocpbench: i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
