"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from sparsetrain import ModelParams, Seed, sample_channel
from sparsetrain.kernels import backends
from sparsetrain.model import detection_threshold, snr_zero
from sparsetrain.signals import frequency_observe, impulse_observe, sample_frequency_subset


def impulse_case(k_c, k_d, L):
    params = ModelParams(k_c, k_d, L, sampling_mode="fixed_count")
    h = sample_channel(params, Seed(1))
    obs = impulse_observe(h, snr_zero(params), Seed(2))
    return params, np.ascontiguousarray(obs.samples), obs.gain


def omp_case(k_c, k_d, L, m):
    params = ModelParams(k_c, k_d, L, sampling_mode="fixed_count")
    h = sample_channel(params, Seed(1))
    subset = sample_frequency_subset(k_c, m, Seed(3))
    obs = frequency_observe(h, 4 * snr_zero(params), subset, Seed(2))
    floor = 1.05 * np.sqrt(m)
    return (obs.measurements, subset.indices.astype(np.int64), k_c, k_d, L, floor)


def best_of(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    impls = backends()
    if "compiled" not in impls:
        print("compiled extension not built; only the numpy fallback is available")

    cases = []
    for shape in ((16384, 4096, 16), (65536, 16384, 64)):
        params, y, gain = impulse_case(*shape)
        t = detection_threshold(params)
        cases.append((f"threshold k_c={shape[0]}", lambda k, y=y, p=params, t=t: k.threshold_estimate(y, p.k_d, t, 1 / np.sqrt(p.L))))
        cases.append((
            f"bg_posterior k_c={shape[0]}",
            lambda k, y=y, p=params, g=gain: k.bg_posterior(y, p.k_d, g, p.activation_probability, 1 / p.L),
        ))
    for shape in ((256, 64, 4, 32), (4096, 1024, 8, 200), (4096, 1024, 32, 400), (16384, 4096, 16, 600)):
        call = omp_case(*shape)
        cases.append((f"omp k_c={shape[0]} k_d={shape[1]} L={shape[2]} m={shape[3]}", lambda k, c=call: k.omp(*c)))

    names = sorted(impls)
    print(f"{'kernel':44s}" + "".join(f"{n:>14s}" for n in names) + ("    speedup" if len(names) == 2 else ""))
    for label, run in cases:
        times = {n: best_of(lambda: run(impls[n]), args.repeat) for n in names}
        row = f"{label:44s}" + "".join(f"{times[n] * 1e3:11.3f} ms" for n in names)
        if len(names) == 2:
            row += f"   {times['python'] / times['compiled']:7.2f}x"
        print(row)


if __name__ == "__main__":
    main()
