"""Command-line front end: simulate, compare, verify, bench.

Exit codes: 0 success, 1 verification or comparison failure, 2 usage or
config error.  Every command is deterministic given its flags and seeds
(benchmark timing columns excepted).  The default output directory of
`compare` can be overridden with the IT2SIM_OUT_DIR environment variable.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import statistics
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import presets
from .config import ConfigError, load_config
from .core import t1_output
from .decomposed import combine_centroid, evaluate_paths, it2_output
from .oracle import fou_centroid_bruteforce, km_centroid, random_fou_pair
from .pendulum import Metrics, SimConfig, Trace, compute_metrics, run_closed_loop

__all__ = ["main"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_METRIC_NAMES = ("settling_time", "overshoot", "ise", "post_settle_rms")


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _metrics_line(name: str, trace: Trace, metrics: Metrics) -> str:
    settling = "none" if metrics.settling_time is None else f"{metrics.settling_time:.3f}s"
    return (
        f"{name}: settled={'yes' if metrics.settled else 'NO'} "
        f"settling_time={settling} overshoot={metrics.overshoot:.6g} "
        f"ise={metrics.ise:.6g} post_settle_rms={metrics.post_settle_rms:.6g} "
        f"undefined_outputs={trace.undefined_output_count}"
    )


# ---------------------------------------------------------------- simulate


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _fail_usage(str(exc))
    if args.controller != cfg.controller_type:
        return _fail_usage(
            f"config defines a {cfg.controller_type!r} controller but {args.controller!r} was requested"
        )
    sim = cfg.sim_config(
        dt=args.dt,
        duration=args.duration,
        theta0=args.theta0,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    trace = run_closed_loop(sim)
    trace.write_csv(args.out)
    if trace.aborted:
        print(f"{args.controller}: {trace.abort_reason}", file=sys.stderr)
        return EXIT_FAILURE
    print(_metrics_line(args.controller, trace, compute_metrics(trace, band=args.band)))
    return EXIT_OK


# ----------------------------------------------------------------- compare


def _load_experiment(path: Path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(str(path), "file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a JSON object")
    if not isinstance(doc.get("scenario"), str):
        raise ConfigError("scenario", "missing or not a string")
    variants = doc.get("variants")
    if not isinstance(variants, list) or not variants:
        raise ConfigError("variants", "expected a non-empty list")
    for i, variant in enumerate(variants):
        if not isinstance(variant, dict) or not isinstance(variant.get("name"), str):
            raise ConfigError(f"variants[{i}].name", "missing or not a string")
        if not isinstance(variant.get("config"), str):
            raise ConfigError(f"variants[{i}].config", "missing or not a string")
    names = [v["name"] for v in variants]
    if len(set(names)) != len(names):
        raise ConfigError("variants", "variant names must be distinct")
    return doc


def _experiment_seeds(doc: dict) -> list[int]:
    if "seeds" in doc:
        seeds = doc["seeds"]
        if not isinstance(seeds, list) or not all(isinstance(s, int) for s in seeds) or not seeds:
            raise ConfigError("seeds", "expected a non-empty list of integers")
    else:
        reps = doc.get("repetitions", 1)
        base = doc.get("base_seed", 1)
        if not isinstance(reps, int) or reps < 1:
            raise ConfigError("repetitions", "expected a positive integer")
        if not isinstance(base, int):
            raise ConfigError("base_seed", "expected an integer")
        seeds = list(range(base, base + reps))
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds", "seeds must be distinct across repetitions")
    return seeds


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.pstdev(values) if len(values) > 1 else 0.0
    return mean, std


def cmd_compare(args: argparse.Namespace) -> int:
    spec_path = Path(args.spec)
    try:
        doc = _load_experiment(spec_path)
        seeds = _experiment_seeds(doc)
    except ConfigError as exc:
        return _fail_usage(str(exc))
    scenario = doc["scenario"]
    out_dir = Path(
        args.out_dir
        or doc.get("out_dir")
        or os.path.join(os.environ.get("IT2SIM_OUT_DIR", "out"), scenario)
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    band = float(doc.get("settle_band", 0.005))
    overrides = doc.get("sim_overrides", {})
    if not isinstance(overrides, dict):
        return _fail_usage("config key 'sim_overrides': expected an object")

    results: dict[str, list[tuple[int, Trace, Metrics]]] = {}
    failed_runs: list[str] = []
    first_trace_file: dict[str, str] = {}
    for variant in doc["variants"]:
        name = variant["name"]
        config_path = spec_path.parent / variant["config"]
        try:
            cfg = load_config(config_path)
        except ConfigError as exc:
            return _fail_usage(str(exc))
        var_overrides = dict(overrides)
        var_overrides.update(variant.get("sim_overrides", {}))
        rows = []
        for seed in seeds:
            sim = cfg.sim_config(seed=seed, **var_overrides)
            trace = run_closed_loop(sim)
            trace_file = f"{name}_seed{seed}.csv"
            trace.write_csv(out_dir / trace_file)
            first_trace_file.setdefault(name, trace_file)
            if trace.aborted:
                failed_runs.append(f"{name} seed {seed}: {trace.abort_reason}")
                continue
            rows.append((seed, trace, compute_metrics(trace, band=band)))
        results[name] = rows

    _write_report_csv(out_dir / "report.csv", results)
    summary, expectations_ok = _summarize(doc, seeds, results, failed_runs, band)
    (out_dir / "report.txt").write_text(summary)
    print(summary, end="")
    if args.plot:
        _write_plot_script(out_dir, first_trace_file)
    if failed_runs or not expectations_ok:
        return EXIT_FAILURE
    return EXIT_OK


def _write_report_csv(path: Path, results: dict[str, list[tuple[int, Trace, Metrics]]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["variant", "seed", "settled", "settling_time", "overshoot", "ise",
             "post_settle_rms", "undefined_outputs"]
        )
        for name in sorted(results):
            for seed, trace, m in sorted(results[name]):
                writer.writerow(
                    [
                        name,
                        seed,
                        int(m.settled),
                        "" if m.settling_time is None else repr(m.settling_time),
                        repr(m.overshoot),
                        repr(m.ise),
                        repr(m.post_settle_rms),
                        trace.undefined_output_count,
                    ]
                )


def _variant_means(rows: list[tuple[int, Trace, Metrics]]) -> dict[str, tuple[float, float] | None]:
    means: dict[str, tuple[float, float] | None] = {}
    for metric in _METRIC_NAMES:
        values = [getattr(m, metric) for _, _, m in rows]
        if metric == "settling_time" and any(v is None for v in values):
            means[metric] = None
        elif values:
            means[metric] = _mean_std(values)
        else:
            means[metric] = None
    return means


def _summarize(
    doc: dict,
    seeds: list[int],
    results: dict[str, list[tuple[int, Trace, Metrics]]],
    failed_runs: list[str],
    band: float,
) -> tuple[str, bool]:
    lines = [f"scenario: {doc['scenario']}"]
    lines.append(f"seeds: {', '.join(str(s) for s in seeds)}")
    lines.append(f"settle band: {band} rad")
    names = [v["name"] for v in doc["variants"]]
    means = {name: _variant_means(results.get(name, [])) for name in names}
    lines.append("per-variant mean (std) across repetitions:")
    for name in names:
        parts = []
        for metric in _METRIC_NAMES:
            stat = means[name][metric]
            parts.append(f"{metric}={stat[0]:.6g} ({stat[1]:.3g})" if stat else f"{metric}=n/a")
        lines.append(f"  {name}: " + " ".join(parts))
    lines.append("pairwise deltas (second minus first, of means):")
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            parts = []
            for metric in _METRIC_NAMES:
                sa, sb = means[a][metric], means[b][metric]
                parts.append(
                    f"{metric}={sb[0] - sa[0]:+.6g}" if sa and sb else f"{metric}=n/a"
                )
            lines.append(f"  {b} - {a}: " + " ".join(parts))
    for failure in failed_runs:
        lines.append(f"FAILED RUN: {failure}")
    expectations_ok = True
    expects = doc.get("expect", [])
    if expects:
        lines.append("expectations:")
        for exp in expects:
            ok, text = _check_expectation(exp, means)
            expectations_ok = expectations_ok and ok
            lines.append(f"  {'PASS' if ok else 'FAIL'} {text}")
    verdict = "PASS" if expectations_ok and not failed_runs else "FAIL"
    lines.append(f"overall: {verdict}")
    return "\n".join(lines) + "\n", expectations_ok


def _check_expectation(exp: dict, means: dict) -> tuple[bool, str]:
    metric = exp.get("metric")
    left, op, right = exp.get("left"), exp.get("op"), exp.get("right")
    text = f"{metric}({left}) {op} {metric}({right})"
    if metric not in _METRIC_NAMES or op not in ("<=", ">=") or left not in means or right not in means:
        return False, text + "  [malformed expectation]"
    stat_l, stat_r = means[left][metric], means[right][metric]
    if stat_l is None or stat_r is None:
        return False, text + "  [metric unavailable: run did not settle]"
    value_l, value_r = stat_l[0], stat_r[0]
    ok = value_l <= value_r if op == "<=" else value_l >= value_r
    return ok, text + f"  ({value_l:.6g} vs {value_r:.6g})"


def _write_plot_script(out_dir: Path, trace_files: dict[str, str]) -> None:
    lines = [
        'set datafile separator ","',
        "set xlabel 'time (s)'",
        "set ylabel 'pole angle (rad)'",
        "set key outside",
        "set grid",
        "set terminal pngcairo size 960,600",
        "set output 'response.png'",
    ]
    plots = [
        f"'{fname}' using 1:2 with lines title '{name}'"
        for name, fname in sorted(trace_files.items())
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    (out_dir / "plot.gp").write_text("\n".join(lines) + "\n")


# ------------------------------------------------------------------ verify


def _suite_line(name: str, passed: int, total: int, tol: float, worst: float) -> tuple[bool, str]:
    ok = passed == total
    status = "PASS" if ok else "FAIL"
    return ok, f"{status} {name}: {passed}/{total} within {tol:.6g} (max deviation {worst:.3g})"


def cmd_verify(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    sat = presets.INPUT_SATURATION
    lines = []
    all_ok = True

    # zero-blur systems must collapse to the plain type-1 controller
    t1 = presets.pendulum_t1_system()
    it2_flat = presets.pendulum_it2_system(delta=0.0)
    points = rng.uniform(-sat, sat, size=(args.cases, 2))
    worst = 0.0
    passed = 0
    for e, e_dot in points:
        diff = abs(it2_output(it2_flat, (e, e_dot)) - t1_output(t1, (e, e_dot)))
        worst = max(worst, diff)
        passed += diff <= args.tol_collapse
    ok, line = _suite_line("zero_blur_collapse", passed, args.cases, args.tol_collapse, worst)
    all_ok &= ok
    lines.append(line)

    # closed-form combiner against the planar brute-force centroid
    lo, hi = presets.force_variable().universe
    span = hi - lo
    n_oracle = max(100, args.cases // 10)
    tol_abs = args.tol_oracle * span
    worst = 0.0
    passed = 0
    for _ in range(n_oracle):
        upper, lower = random_fou_pair(rng, lo, hi)
        diff = abs(combine_centroid(upper, lower).crisp - fou_centroid_bruteforce(upper, lower))
        worst = max(worst, diff)
        passed += diff <= tol_abs
    ok, line = _suite_line("closed_form_vs_bruteforce", passed, n_oracle, tol_abs, worst)
    all_ok &= ok
    lines.append(line)

    # closed-form output stays near the iterative type-reduced centroid
    # on aggregates taken along the stabilization trajectory
    it2 = presets.pendulum_it2_system()
    trace = run_closed_loop(SimConfig(controller=it2))
    n_km = 50
    indices = np.linspace(0, len(trace) - 1, n_km).astype(int)
    tol_km_abs = args.tol_km * span
    worst = 0.0
    passed = 0
    for idx in indices:
        e = float(trace.error_measured[idx])
        e_dot = min(max(-float(trace.angular_velocity[idx]), -sat), sat)
        upper, lower = evaluate_paths(it2, (e, e_dot))
        diff = abs(combine_centroid(upper, lower).crisp - km_centroid(upper, lower).midpoint)
        worst = max(worst, diff)
        passed += diff <= tol_km_abs
    ok, line = _suite_line("km_proximity", passed, n_km, tol_km_abs, worst)
    all_ok &= ok
    lines.append(line)

    print("\n".join(lines))
    return EXIT_OK if all_ok else EXIT_FAILURE


# ------------------------------------------------------------------- bench


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        grids = [int(g) for g in args.grids.split(",") if g]
    except ValueError:
        return _fail_usage(f"--grids must be a comma-separated integer list, got {args.grids!r}")
    if not grids or any(g < 2 for g in grids):
        return _fail_usage("--grids needs grid sizes of at least 2")
    rng = np.random.default_rng(args.seed)
    lo, hi = presets.force_variable().universe
    rows = []
    for grid_size in grids:
        for case_id in range(args.cases):
            upper, lower = random_fou_pair(rng, lo, hi, grid_size)
            start = time.perf_counter_ns()
            closed = combine_centroid(upper, lower).crisp
            closed_ns = time.perf_counter_ns() - start
            start = time.perf_counter_ns()
            interval = km_centroid(upper, lower)
            km_ns = time.perf_counter_ns() - start
            rows.append(("combine_centroid", grid_size, case_id, closed, "n/a", closed_ns))
            rows.append(("km_defuzz", grid_size, case_id, interval.midpoint, interval.iterations, km_ns))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "grid_size", "case_id", "y", "iterations", "nanoseconds"])
        for method, grid_size, case_id, value, iterations, ns in rows:
            writer.writerow([method, grid_size, case_id, repr(float(value)), iterations, ns])
    for grid_size in grids:
        for method in ("combine_centroid", "km_defuzz"):
            times = [r[5] for r in rows if r[0] == method and r[1] == grid_size]
            print(f"{method} grid={grid_size}: median {statistics.median(times) / 1e3:.1f} us")
    return EXIT_OK


# -------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="it2sim",
        description="Fuzzy pendulum control: simulate, compare, verify, bench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one closed-loop simulation, write a trace CSV")
    sim.add_argument("--config", required=True, help="system/sim config file (JSON)")
    sim.add_argument("--controller", required=True, choices=("t1", "it2"))
    sim.add_argument("--out", required=True, help="trace CSV path")
    sim.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--duration", type=float)
    sim.add_argument("--theta0", type=float)
    sim.add_argument("--band", type=float, default=0.005, help="settling band (rad)")
    sim.set_defaults(func=cmd_simulate)

    cmp_ = sub.add_parser("compare", help="run an experiment spec across variants and seeds")
    cmp_.add_argument("--spec", required=True, help="experiment spec file (JSON)")
    cmp_.add_argument("--out-dir", dest="out_dir")
    cmp_.add_argument("--plot", action="store_true", help="emit a gnuplot overlay script")
    cmp_.set_defaults(func=cmd_compare)

    ver = sub.add_parser("verify", help="run the numerical cross-check suites")
    ver.add_argument("--cases", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--tol-collapse", type=float, default=1e-9, dest="tol_collapse")
    ver.add_argument("--tol-oracle", type=float, default=1e-4, dest="tol_oracle",
                     help="tolerance as a fraction of the output span")
    ver.add_argument("--tol-km", type=float, default=0.10, dest="tol_km",
                     help="tolerance as a fraction of the output span")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="time closed-form vs iterative defuzzification")
    bench.add_argument("--cases", type=int, default=100)
    bench.add_argument("--grids", default="101,1001")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", required=True, help="benchmark CSV path")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail_usage(str(exc))


if __name__ == "__main__":
    sys.exit(main())
