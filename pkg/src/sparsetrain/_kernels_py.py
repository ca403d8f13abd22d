"""Numpy implementations of the per-trial kernels.

Reference fallback for :mod:`sparsetrain._kernels`; same signatures, same results
to rounding.
"""
import numpy as np

from .signals import partial_dft


def threshold_estimate(samples, k_d, threshold, amplitude):
    """Keep taps below ``k_d`` with ``|y| >= threshold``, set them to ``sign(y) * amplitude``."""
    samples = np.asarray(samples, dtype=np.float64)
    head = samples[:k_d]
    # relative slack keeps the noiseless boundary case (|y| == threshold) on the detected side
    support = np.flatnonzero(np.abs(head) >= threshold * (1.0 - 1e-12))
    estimate = np.zeros(samples.size)
    estimate[support] = amplitude * np.sign(head[support])
    return estimate, support.astype(np.intp)


def bg_posterior(samples, k_d, gain, p, var):
    """Posterior mean of ``h`` under a Bernoulli(p)-Gaussian(0, var) prior.

    Observation model per tap: ``y = gain * h + n`` with unit-variance noise.
    """
    samples = np.asarray(samples, dtype=np.float64)
    y = samples[:k_d]
    active_var = gain * gain * var + 1.0
    estimate = np.zeros(samples.size)
    if p >= 1.0:
        estimate[:k_d] = gain * var / active_var * y
        return estimate
    log_prior = np.log(p) - np.log1p(-p)
    llr = log_prior - 0.5 * np.log(active_var) + 0.5 * y * y * (1.0 - 1.0 / active_var)
    activity = 0.5 * (1.0 + np.tanh(0.5 * llr))
    estimate[:k_d] = activity * (gain * var / active_var) * y
    return estimate


def _correlate(residual, indices, k_c, k_d):
    # A^H r for A[j, k] = exp(-2j*pi*indices[j]*k/k_c), via one inverse FFT
    spectrum = np.zeros(k_c, dtype=complex)
    spectrum[indices] = residual
    return k_c * np.fft.ifft(spectrum)[:k_d]


def omp(measurements, indices, k_c, k_d, sparsity, floor):
    """Orthogonal matching pursuit over the first ``k_d`` columns of a partial DFT.

    ``sparsity < 0`` means no iteration cap beyond ``min(m, k_d)``. Stops early
    once the residual norm is at most ``floor``.

    Returns (selected columns in selection order, complex coefficients,
    residual norms starting with the initial one).
    """
    y = np.asarray(measurements, dtype=np.complex128)
    indices = np.asarray(indices, dtype=np.int64)
    m = y.size
    max_iter = min(m, k_d) if sparsity < 0 else min(sparsity, k_d)
    residual = y.copy()
    norms = [float(np.linalg.norm(residual))]
    selected = []
    coef = np.zeros(0, dtype=complex)
    for _ in range(max_iter):
        if norms[-1] <= floor:
            break
        corr = np.abs(_correlate(residual, indices, k_c, k_d))
        corr[selected] = -1.0
        selected.append(int(np.argmax(corr)))
        A = partial_dft(indices, selected, k_c)
        coef = np.linalg.lstsq(A, y, rcond=None)[0]
        residual = y - A @ coef
        norms.append(float(np.linalg.norm(residual)))
    return np.array(selected, dtype=np.intp), coef, np.array(norms)
