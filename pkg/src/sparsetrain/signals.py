"""Training signals and noisy channel observations.

Harmonic vectors use 0-based indices: ``f_i[k] = exp(2j*pi*i*k/k_c) / sqrt(k_c)``
for ``i, k = 0 .. k_c-1``. With this convention ``h (*) f_i = lambda_i f_i`` where
``lambda_i`` is the i-th DFT coefficient of ``h``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .model import ChannelRealization, as_seed


@dataclass(frozen=True)
class FrequencySubset:
    k_c: int
    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        if idx.ndim != 1 or idx.size == 0 or idx.size > self.k_c:
            raise DomainError("subset must hold between 1 and k_c indices")
        if np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.k_c:
            raise DomainError("subset indices must be strictly increasing and in [0, k_c)")
        object.__setattr__(self, "indices", idx)

    @property
    def m(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class ImpulseObservation:
    """Received impulse-probing signal ``sqrt(snr * k_c) h + noise_std * z``."""

    samples: np.ndarray
    snr: float
    noise_std: float = 1.0

    @property
    def k_c(self) -> int:
        return int(self.samples.size)

    @property
    def gain(self) -> float:
        return math.sqrt(self.snr * self.k_c)


@dataclass(frozen=True)
class FrequencyObservation:
    """Projected frequency measurements ``sqrt(snr * k_c / m) lambda + noise_std * z``."""

    subset: FrequencySubset
    measurements: np.ndarray
    snr: float
    noise_std: float = 1.0

    @property
    def gain(self) -> float:
        return math.sqrt(snr_f(self.subset.k_c, self.subset.m, self.snr))


@lru_cache(maxsize=16)
def twiddle(k_c: int) -> np.ndarray:
    """Table of ``exp(-2j*pi*n/k_c)``; read-only."""
    table = np.exp(-2j * np.pi * np.arange(k_c) / k_c)
    table.flags.writeable = False
    return table


def partial_dft(indices, columns, k_c: int) -> np.ndarray:
    """Matrix ``A[j, c] = exp(-2j*pi*indices[j]*columns[c]/k_c)``."""
    indices = np.asarray(indices, dtype=np.int64)
    columns = np.asarray(columns, dtype=np.int64)
    return twiddle(k_c)[np.outer(indices, columns) % k_c]


def _check_snr(snr):
    if not snr > 0:
        raise DomainError(f"snr must be positive, got {snr}")


def impulse_signal(k_c: int) -> np.ndarray:
    x = np.zeros(k_c)
    x[0] = math.sqrt(k_c)
    return x


def impulse_observe(h: ChannelRealization, snr: float, seed, noiseless: bool = False) -> ImpulseObservation:
    _check_snr(snr)
    signal = math.sqrt(snr * h.length) * h.dense()
    if noiseless:
        return ImpulseObservation(signal, snr, noise_std=0.0)
    noise = as_seed(seed).rng().standard_normal(h.length)
    return ImpulseObservation(signal + noise, snr)


def sample_frequency_subset(k_c: int, m: int, seed) -> FrequencySubset:
    if not 1 <= m <= k_c:
        raise DomainError(f"need 1 <= m <= k_c, got m={m}, k_c={k_c}")
    rng = as_seed(seed).rng()
    return FrequencySubset(k_c, np.sort(rng.choice(k_c, size=m, replace=False)))


def frequency_signal(subset: FrequencySubset) -> np.ndarray:
    """Time-domain training signal: scaled sum of the selected harmonics, squared norm k_c."""
    k_c = subset.k_c
    spectrum = np.zeros(k_c, dtype=complex)
    spectrum[subset.indices] = 1.0
    # sum_i exp(2j*pi*i*k/k_c) over the subset == k_c * ifft(indicator)
    harmonics_sum = k_c * np.fft.ifft(spectrum) / math.sqrt(k_c)
    return math.sqrt(k_c / subset.m) * harmonics_sum


def harmonic_rows(subset: FrequencySubset) -> np.ndarray:
    """Rows of the projection: the conjugated harmonic vectors, shape (m, k_c)."""
    k_c = subset.k_c
    return partial_dft(subset.indices, np.arange(k_c), k_c) / math.sqrt(k_c)


def dft_eigenvalues(h: ChannelRealization, subset: FrequencySubset) -> np.ndarray:
    if h.length != subset.k_c:
        raise DomainError("channel length and subset k_c differ")
    if h.support.size == 0:
        return np.zeros(subset.m, dtype=complex)
    return partial_dft(subset.indices, h.support, h.length) @ h.gains


def circular_convolve(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"circular convolution needs equal-length vectors, got {a.shape} and {b.shape}")
    out = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))
    if np.isrealobj(a) and np.isrealobj(b):
        return out.real
    return out


def snr_f(k_c: int, m: int, snr: float) -> float:
    if not 1 <= m <= k_c:
        raise DomainError(f"need 1 <= m <= k_c, got m={m}, k_c={k_c}")
    _check_snr(snr)
    return k_c / m * snr


def frequency_observe(
    h: ChannelRealization,
    snr: float,
    subset: FrequencySubset,
    seed,
    noiseless: bool = False,
) -> FrequencyObservation:
    """Simulate the m projected measurements directly in the frequency domain.

    Noise is circular complex Gaussian with unit variance per measurement.
    """
    gain = math.sqrt(snr_f(subset.k_c, subset.m, snr))
    signal = gain * dft_eigenvalues(h, subset)
    if noiseless:
        return FrequencyObservation(subset, signal, snr, noise_std=0.0)
    rng = as_seed(seed).rng()
    noise = (rng.standard_normal(subset.m) + 1j * rng.standard_normal(subset.m)) / math.sqrt(2.0)
    return FrequencyObservation(subset, signal + noise, snr)
