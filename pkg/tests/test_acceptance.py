"""Acceptance criteria, each at its stated tolerance.

Every check prints one ``criterion N: PASS|FAIL ...`` line. Run directly with
``python3 tests/test_acceptance.py`` for the summary alone.
"""
import functools
import math
import time

import numpy as np
import pytest

from sparsetrain import (
    ExperimentConfig,
    ModelParams,
    Seed,
    empirical_mutual_info,
    fletcher_compare,
    locate_transition,
    mmse_hc_step,
    mmse_hg_quadrature,
    mmse_hg_theory,
    penalty_bound,
    run_sweep,
    sample_channel,
    snr_zero,
    training_mutual_info,
)
from sparsetrain.estimators import omp_recover
from sparsetrain.output import sweep_csv
from sparsetrain.signals import (
    circular_convolve,
    dft_eigenvalues,
    frequency_observe,
    frequency_signal,
    harmonic_rows,
    sample_frequency_subset,
)

P0 = ModelParams(16384, 4096, 16, gain_model="constant", sampling_mode="fixed_count")
P0_GAUSSIAN = ModelParams(16384, 4096, 16, gain_model="gaussian", sampling_mode="bernoulli")
CRITERION1_GRID = (0.02, 0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0)


def _report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line, flush=True)
    return ok, line


@functools.lru_cache(maxsize=None)
def criterion1_sweep():
    cfg = ExperimentConfig(P0, snr_grid=CRITERION1_GRID, trials_per_point=200, master_seed=11)
    start = time.perf_counter()
    result = run_sweep(cfg, workers=1)
    return result, time.perf_counter() - start


def _point(result, rel):
    return next(p for p in result.points if math.isclose(p.snr_relative, rel))


def criterion_1():
    result, elapsed = criterion1_sweep()
    s0 = snr_zero(P0)
    hi, lo = _point(result, 4.0).mean_mse, _point(result, 0.5).mean_mse
    crossing = locate_transition(result.snr, result.mean_mse, 0.5)
    rel = None if crossing is None else crossing / s0
    ok = hi < 0.10 and lo > 0.60 and rel is not None and 0.5 <= rel <= 2.5 and elapsed < 120
    return _report(
        1, ok, f"mse(4 S0)={hi:.4f}<0.10 mse(0.5 S0)={lo:.4f}>0.60 transition={rel:.4f} S0 time={elapsed:.1f}s"
    )


def criterion_2():
    cfg = ExperimentConfig(
        P0_GAUSSIAN, estimator="bg_posterior", snr_grid=(0.25, 1.0, 4.0), trials_per_point=500, master_seed=5
    )
    result = run_sweep(cfg, workers=1)
    s0 = snr_zero(P0_GAUSSIAN)
    parts, ok = [], True
    for p in result.points:
        theory = mmse_hg_theory(p.snr, P0_GAUSSIAN)
        gap = p.mean_mse - theory
        ok &= abs(gap) <= 0.06
        parts.append(f"{p.snr_relative:g}S0: {p.mean_mse:.4f} vs {theory:.4f} (gap {gap:+.4f})")
    at_s0 = mmse_hg_theory(s0, P0_GAUSSIAN)
    closed = math.erf(1 / math.sqrt(2)) - math.sqrt(2 / math.pi) * math.exp(-0.5)
    ok &= abs(at_s0 - 0.198748) <= 1e-5 and abs(at_s0 - closed) <= 1e-12
    return _report(2, ok, "; ".join(parts) + f"; mmse_hg(S0)={at_s0:.6f}")


def criterion_3():
    s0 = snr_zero(P0)
    low, high = 0.25 * s0, 4 * s0
    order_low = mmse_hg_theory(low, P0) < mmse_hc_step(low, P0)
    order_high = mmse_hg_theory(high, P0) > mmse_hc_step(high, P0)
    grid = np.geomspace(0.05, 10, 20) * s0
    margins = [penalty_bound(s, P0, "gaussian").penalty - penalty_bound(s, P0, "constant").penalty for s in grid]
    ok = order_low and order_high and min(margins) >= 0
    return _report(3, ok, f"hg<hc at 0.25 S0: {order_low}; hg>hc at 4 S0: {order_high}; min penalty gap {min(margins):.4g}")


def criterion_4():
    params = ModelParams(4096, 1024, 8, sampling_mode="fixed_count")
    cfg = ExperimentConfig(
        params, "frequency", "omp", snr_grid=(0.25, 4.0), trials_per_point=200, master_seed=21, m=200
    )
    result = run_sweep(cfg)
    lo, hi = result.points[0].mean_mse, result.points[1].mean_mse
    ok = hi < 0.15 and lo > 0.60
    return _report(4, ok, f"m/k_c={200 / 4096:.3f} mse(4 S0)={hi:.4f}<0.15 mse(0.25 S0)={lo:.4f}>0.60")


def criterion_5():
    grid = [
        (k_c, L)
        for k_c in (256, 1024, 4096, 16384, 65536, 2**20)
        for L in (2, 3, 4, 8, 16, 64, 256)
        if k_c / L >= 64
    ]
    ratios = [fletcher_compare(ModelParams(k_c, k_c // 4 if k_c // 4 >= L else k_c, L), 1.0).energy_ratio for k_c, L in grid]
    single = min(fletcher_compare(ModelParams(k_c, k_c, 1), 1.0).energy_ratio for k_c in (256, 2**20))
    ok = len(grid) >= 20 and min(ratios) >= 4
    return _report(5, ok, f"{len(grid)} configs with L>=2, min ratio {min(ratios):.4f}; L=1 limit {single:.5f} (see notes)")


def criterion_6():
    result, _ = criterion1_sweep()
    s0 = snr_zero(P0)
    info = empirical_mutual_info(result.snr, result.mean_mse, P0, result.std_err)
    j = int(np.argmin(np.abs(result.snr - 2 * s0)))
    theory = training_mutual_info(result.snr[j], P0, "constant")
    empirical = info.mutual_info.values[j]
    rel_err = abs(empirical - theory) / theory
    pen, sig = info.penalty.values, info.penalty_sigma
    monotone = all(pen[i + 1] <= pen[i] + 3 * math.hypot(sig[i], sig[i + 1]) for i in range(pen.size - 1))
    ok = rel_err <= 0.15 and monotone
    return _report(
        6,
        ok,
        f"MI(2 S0) empirical={empirical:.2f} theory={theory:.2f} rel_err={rel_err:.3f} "
        f"(uncapped {info.uncapped[j]:.2f}); penalty non-increasing: {monotone}",
    )


def _invariants():
    failures = []
    for k_c, m in ((64, 7), (256, 40), (1024, 1024)):
        subset = sample_frequency_subset(k_c, m, Seed(3, (k_c,)))
        x = frequency_signal(subset)
        if abs(np.vdot(x, x).real - k_c) > 1e-9 * k_c:
            failures.append("energy")
        rows = harmonic_rows(subset)
        if np.max(np.abs(rows @ rows.conj().T - np.eye(m))) > 1e-12:
            failures.append("orthonormal")
        h = sample_channel(ModelParams(k_c, k_c // 4, 3), Seed(4, (k_c,)))
        lam = dft_eigenvalues(h, subset)
        # each harmonic is an eigenvector of cyclic convolution with h
        harmonics = rows.conj()
        for value, f in zip(lam, harmonics):
            if np.linalg.norm(circular_convolve(h.dense(), f) - value * f) > 1e-9:
                failures.append("eigenvalue")
    params = ModelParams(1024, 256, 6, sampling_mode="fixed_count")
    for t in range(20):
        seed = Seed(9, (t,))
        h = sample_channel(params, seed.child(0))
        subset = sample_frequency_subset(1024, 60, seed.child(2))
        obs = frequency_observe(h, 0.05, subset, seed.child(1))
        norms = omp_recover(obs, params, sparsity=12, noise_margin=-1.0).diagnostics["residual_norms"]
        if np.any(np.diff(norms) > 1e-12 * norms[0]):
            failures.append("omp_residual")
    for rel in (0.1, 0.5, 1.0, 2.0, 10.0):
        s = rel * snr_zero(P0)
        if abs(mmse_hg_quadrature(s, P0) - mmse_hg_theory(s, P0)) > 1e-8:
            failures.append("quadrature")
    return failures


def criterion_7():
    params = ModelParams(2048, 512, 8, sampling_mode="fixed_count")
    cfg = ExperimentConfig(params, snr_grid=(0.5, 1.0, 2.0), trials_per_point=40, master_seed=2)
    one = sweep_csv(run_sweep(cfg, workers=1, block_size=5))
    eight = sweep_csv(run_sweep(cfg, workers=8, block_size=5))
    failures = _invariants()
    ok = one.encode() == eight.encode() and not failures
    return _report(7, ok, f"1 vs 8 workers byte-identical: {one == eight}; invariant failures: {sorted(set(failures)) or 'none'}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 8)])
def test_criterion(check, capsys):
    with capsys.disabled():
        print()
        ok, line = check()
    assert ok, line


if __name__ == "__main__":
    verdicts = [check()[0] for check in CRITERIA]
    print(f"{sum(verdicts)}/{len(verdicts)} criteria pass")
