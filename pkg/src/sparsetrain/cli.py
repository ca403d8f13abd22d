"""Command-line front end.

Exit codes: 0 success, 1 configuration or validation error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError
from .estimators import bg_posterior_mean, iht_recover, omp_recover, threshold_detect, evaluate_estimate, Method
from .model import Seed, baron_bounds, detection_threshold, rate_distortion, sample_channel, snr_zero
from .montecarlo import ExperimentConfig, Scheme, run_sweep
from .output import compare_csv, csv_to_svg, sweep_csv, theory_csv
from .signals import frequency_observe, impulse_observe, sample_frequency_subset
from .theory import fletcher_compare, rip_counts, theory_curves

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _Usage(message)


def sci(value: float, digits: int = 4) -> str:
    """Scientific notation without exponent padding: 0.012779 -> '1.2779e-2'."""
    mantissa, exponent = f"{value:.{digits}e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparsetrain", description="Training over sparse multipath channels at low SNR.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out_help="output file (default: stdout)"):
        p.add_argument("--config", required=True, help="experiment configuration (JSON)")
        p.add_argument("--seed", type=int, help="override master_seed")
        p.add_argument("--trials", type=int, help="override trials_per_point")
        p.add_argument("--out", help=out_help)

    p = sub.add_parser("theory", help="closed-form quantities and theory curves")
    common(p, "write the theory curves CSV here")
    p.add_argument("--snr", type=float, default=1.0, help="per-sample SNR for the measurement bound")
    p.add_argument("--c-harmonic", type=float, default=1.0)
    p.add_argument("--c-gaussian", type=float, default=1.0)

    p = sub.add_parser("simulate", help="run a single trial and report it")
    common(p)
    p.add_argument("--snr-index", type=int, default=0)
    p.add_argument("--trial-index", type=int, default=0)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep to CSV")
    common(p)
    p.add_argument("--workers", type=int, help="worker processes (default: SPARSETRAIN_THREADS or CPU count)")

    p = sub.add_parser("compare", help="energy and measurement comparison with exact pattern recovery")
    common(p)
    p.add_argument("--omega-constant", type=float, default=1.0)

    p = sub.add_parser("plot", help="render a sweep or theory CSV as an SVG line chart")
    p.add_argument("csv", help="input CSV")
    p.add_argument("--out", required=True, help="output SVG")
    p.add_argument("--columns", help="comma-separated columns to plot")
    p.add_argument("--title", default="")
    return parser


def _load_config(args) -> ExperimentConfig:
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    if isinstance(data, dict):
        if args.seed is not None:
            data["master_seed"] = args.seed
        if args.trials is not None:
            data["trials_per_point"] = args.trials
    return ExperimentConfig.from_dict(data)


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _cmd_theory(args) -> int:
    config = _load_config(args)
    params = config.params
    s0 = snr_zero(params)
    bounds = baron_bounds(params, args.snr)
    rip = rip_counts(params, args.c_harmonic, args.c_gaussian)
    lines = [
        f"k_c={params.k_c} k_d={params.k_d} L={params.L}",
        f"SNR0={sci(s0)}",
        f"R_h={sci(rate_distortion(params))} nats",
        f"T={sci(detection_threshold(params))}",
        f"baron_min_measurements={bounds.min_measurements} (snr={args.snr:g})",
        f"baron_min_energy={sci(bounds.min_energy)} nats",
        f"rip_harmonic_m={rip.harmonic_m} (c={args.c_harmonic:g})",
        f"rip_gaussian_m={rip.gaussian_m} (c={args.c_gaussian:g})",
    ]
    print("\n".join(lines))
    if args.out:
        grid = config.snr_values
        _emit(theory_csv(grid, s0, theory_curves(params, grid, config.epsilon)), args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = _load_config(args)
    if not 0 <= args.snr_index < len(config.snr_grid):
        raise ConfigError("snr_index", f"must lie in [0, {len(config.snr_grid) - 1}]")
    if not 0 <= args.trial_index < config.trials_per_point:
        raise ConfigError("trial_index", f"must lie in [0, {config.trials_per_point - 1}]")
    params = config.params
    snr = float(config.snr_values[args.snr_index])
    seed = Seed(config.master_seed, (args.snr_index, args.trial_index))
    h = sample_channel(params, seed.child(0))
    lines = [
        f"scheme={config.scheme.value} estimator={config.estimator.value} kernels={kernels.BACKEND}",
        f"k_c={params.k_c} k_d={params.k_d} L={params.L} gain_model={params.gain_model.value}",
        f"SNR0={sci(snr_zero(params))} snr={sci(snr)} ({snr / snr_zero(params):.4g} x SNR0)",
        f"true_support={h.support.tolist()}",
    ]
    if config.scheme is Scheme.IMPULSE:
        obs = impulse_observe(h, snr, seed.child(1), noiseless=config.noiseless)
        estimate = (threshold_detect if config.estimator is Method.THRESHOLD else bg_posterior_mean)(obs, params)
    else:
        subset = sample_frequency_subset(params.k_c, config.measurements, seed.child(2))
        lines.append(f"m={subset.m} snr_f={sci(params.k_c / subset.m * snr)}")
        obs = frequency_observe(h, snr, subset, seed.child(1), noiseless=config.noiseless)
        if config.estimator is Method.OMP:
            estimate = omp_recover(obs, params, config.sparsity)
        else:
            estimate = iht_recover(obs, params, config.sparsity, config.iht_iterations)
    report = evaluate_estimate(h, estimate)
    shown = estimate.detected_support.tolist()
    if len(shown) > 64:
        shown = shown[:64] + ["..."]
    lines += [
        f"detected_support={shown}",
        f"squared_error={report.squared_error:.6g}",
        f"support_precision={report.support_precision:.4f}",
        f"support_recall={report.support_recall:.4f}",
    ]
    for key, value in sorted(estimate.diagnostics.items()):
        if isinstance(value, np.ndarray):
            value = np.array2string(value, precision=4, max_line_width=200)
        lines.append(f"{key}={value}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    if args.workers is not None and args.workers < 0:
        raise ConfigError("workers", "must be >= 0")
    workers = args.workers if args.workers else None
    result = run_sweep(config, workers=workers)
    _emit(sweep_csv(result), args.out)
    anomalies = [p for p in result.points if p.anomalous]
    print(f"config_hash={result.config_hash} seed={result.seed} points={len(result.points)}", file=sys.stderr)
    for p in anomalies:
        print(f"warning: mean_mse={p.mean_mse:.4g} > 2 at snr_rel={p.snr_relative:.4g}", file=sys.stderr)
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _load_config(args)
    records = [fletcher_compare(config.params, float(s), args.omega_constant) for s in config.snr_values]
    _emit(compare_csv(records), args.out)
    return EXIT_OK


def _cmd_plot(args) -> int:
    with open(args.csv) as fh:
        text = fh.read()
    columns = args.columns.split(",") if args.columns else None
    try:
        svg = csv_to_svg(text, columns, title=args.title)
    except ValueError as exc:
        raise ConfigError("csv", str(exc)) from None
    _emit(svg, args.out)
    return EXIT_OK


_COMMANDS = {
    "theory": _cmd_theory,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
}


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage:
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"sparsetrain: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"sparsetrain: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
