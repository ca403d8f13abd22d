# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-trial kernels. Mirrors sparsetrain._kernels_py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, log, log1p, exp

cnp.import_array()


def threshold_estimate(const double[::1] samples, Py_ssize_t k_d, double threshold, double amplitude):
    cdef Py_ssize_t n = samples.shape[0], i, count = 0
    cdef double cut = threshold * (1.0 - 1e-12), v
    estimate = np.zeros(n)
    support = np.empty(k_d, dtype=np.intp)
    cdef double[::1] est = estimate
    cdef Py_ssize_t[::1] sup = support
    for i in range(k_d):
        v = samples[i]
        if fabs(v) >= cut:
            est[i] = amplitude if v > 0 else (-amplitude if v < 0 else 0.0)
            sup[count] = i
            count += 1
    return estimate, support[:count].copy()


def bg_posterior(const double[::1] samples, Py_ssize_t k_d, double gain, double p, double var):
    cdef Py_ssize_t n = samples.shape[0], i
    cdef double active_var = gain * gain * var + 1.0
    cdef double shrink = gain * var / active_var
    cdef double log_prior, log_norm, slope, y, llr
    estimate = np.zeros(n)
    cdef double[::1] est = estimate
    if p >= 1.0:
        for i in range(k_d):
            est[i] = shrink * samples[i]
        return estimate
    log_prior = log(p) - log1p(-p)
    log_norm = -0.5 * log(active_var)
    slope = 0.5 * (1.0 - 1.0 / active_var)
    for i in range(k_d):
        y = samples[i]
        llr = log_prior + log_norm + slope * y * y
        # exp overflow to inf is harmless here: the weight goes to 0
        est[i] = shrink * y / (1.0 + exp(-llr))
    return estimate


def omp(measurements, indices, Py_ssize_t k_c, Py_ssize_t k_d, Py_ssize_t sparsity, double floor):
    """OMP with an incrementally updated QR factorization (modified Gram-Schmidt).

    Correlations use a direct loop over the twiddle table for small
    dictionaries and one inverse FFT otherwise.
    """
    cdef double complex[::1] y = np.ascontiguousarray(measurements, dtype=np.complex128)
    cdef long long[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t max_iter = min(m, k_d) if sparsity < 0 else min(sparsity, k_d)
    table = np.exp(2j * np.pi * np.arange(k_c) / k_c)
    cdef double complex[::1] W = table

    Q_arr = np.zeros((max(max_iter, 1), m), dtype=np.complex128)
    R_arr = np.zeros((max(max_iter, 1), max(max_iter, 1)), dtype=np.complex128)
    cdef double complex[:, ::1] Q = Q_arr
    cdef double complex[:, ::1] R = R_arr
    z_arr = np.zeros(max(max_iter, 1), dtype=np.complex128)
    cdef double complex[::1] z = z_arr
    res_arr = np.array(y, copy=True)
    cdef double complex[::1] r = res_arr
    v_arr = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] v = v_arr
    taken_arr = np.zeros(k_d, dtype=np.uint8)
    cdef unsigned char[::1] taken = taken_arr

    cdef Py_ssize_t s = 0, j, k, l, best, sweep
    cdef double best_val, val, nrm, last_norm, col_norm = sqrt(<double> m)
    cdef double complex acc, proj, rj
    cdef long long phase, step
    # direct correlation costs m*k_d multiply-adds, one FFT about k_c log2(k_c)
    cdef bint use_fft = m * k_d > k_c * max(1.0, np.log2(k_c))
    corr_arr = np.zeros(k_d, dtype=np.complex128)
    cdef double complex[::1] corr = corr_arr
    norms = []
    selected = []

    nrm = 0.0
    for j in range(m):
        nrm += r[j].real * r[j].real + r[j].imag * r[j].imag
    last_norm = sqrt(nrm)
    norms.append(last_norm)

    while s < max_iter:
        if last_norm <= floor:
            break
        if use_fft:
            spectrum = np.zeros(k_c, dtype=np.complex128)
            spectrum[indices] = res_arr
            corr_arr = np.fft.ifft(spectrum)[:k_d]
            corr = corr_arr
        else:
            for k in range(k_d):
                corr[k] = 0.0
            for j in range(m):
                step = idx[j] % k_c
                phase = 0
                rj = r[j]
                for k in range(k_d):
                    corr[k] = corr[k] + W[phase] * rj
                    phase += step
                    if phase >= k_c:
                        phase -= k_c
        best = -1
        best_val = -1.0
        for k in range(k_d):
            if taken[k]:
                continue
            val = corr[k].real * corr[k].real + corr[k].imag * corr[k].imag
            if val > best_val:
                best_val = val
                best = k
        # new dictionary column, conjugate table entries
        for j in range(m):
            phase = (idx[j] * best) % k_c
            v[j] = W[phase].conjugate()
        for sweep in range(2):
            for l in range(s):
                proj = 0.0
                for j in range(m):
                    proj = proj + Q[l, j].conjugate() * v[j]
                R[l, s] = R[l, s] + proj
                for j in range(m):
                    v[j] = v[j] - proj * Q[l, j]
        nrm = 0.0
        for j in range(m):
            nrm += v[j].real * v[j].real + v[j].imag * v[j].imag
        nrm = sqrt(nrm)
        if nrm <= 1e-10 * col_norm:
            break
        R[s, s] = nrm
        proj = 0.0
        for j in range(m):
            Q[s, j] = v[j] / nrm
            proj = proj + Q[s, j].conjugate() * y[j]
        z[s] = proj
        nrm = 0.0
        for j in range(m):
            r[j] = r[j] - proj * Q[s, j]
            nrm += r[j].real * r[j].real + r[j].imag * r[j].imag
        taken[best] = 1
        selected.append(best)
        s += 1
        last_norm = sqrt(nrm)
        norms.append(last_norm)

    coef_arr = np.zeros(s, dtype=np.complex128)
    cdef double complex[::1] coef = coef_arr
    for l in range(s - 1, -1, -1):
        acc = z[l]
        for k in range(l + 1, s):
            acc = acc - R[l, k] * coef[k]
        coef[l] = acc / R[l, l]
    return np.array(selected, dtype=np.intp), coef_arr, np.array(norms)
