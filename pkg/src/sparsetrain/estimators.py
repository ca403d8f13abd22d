"""Channel estimators and estimate evaluation.

Impulse probing: hard-threshold detection (constant-magnitude gains) and the
scalar Bernoulli-Gaussian posterior mean (Gaussian gains). Frequency-domain
training: OMP and IHT over the partial-DFT dictionary restricted to the first
``k_d`` delays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError
from .model import ChannelRealization, ModelParams, detection_threshold
from .signals import FrequencyObservation, ImpulseObservation


class Method(str, enum.Enum):
    THRESHOLD = "threshold"
    BG_POSTERIOR = "bg_posterior"
    OMP = "omp"
    IHT = "iht"


SOLVER_SUPPORT_TOL = 1e-6


@dataclass
class ChannelEstimate:
    estimate: np.ndarray
    detected_support: np.ndarray
    method: Method
    support_tol: float = SOLVER_SUPPORT_TOL
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EvaluationReport:
    squared_error: float
    support_precision: float
    support_recall: float


def threshold_detect(obs: ImpulseObservation, params: ModelParams) -> ChannelEstimate:
    """Declare taps with ``|y_i| >= T`` active, with gain ``sign(y_i) / sqrt(L)``."""
    amplitude = 1.0 / math.sqrt(params.L)
    estimate, support = kernels.threshold_estimate(
        np.ascontiguousarray(obs.samples, dtype=np.float64),
        params.k_d,
        detection_threshold(params),
        amplitude,
    )
    return ChannelEstimate(estimate, support, Method.THRESHOLD, support_tol=0.5 * amplitude)


def bg_posterior_mean(obs: ImpulseObservation, params: ModelParams) -> ChannelEstimate:
    """Per-tap posterior mean under the Bernoulli-Gaussian prior.

    With ``c = sqrt(snr * k_c)``, ``s2 = 1/L`` and ``v = c^2 s2 + 1`` the tap
    observation is N(0, v) when active and N(0, 1) otherwise, so

        P(active | y) = sigmoid(ln(p/(1-p)) - ln(v)/2 + y^2 (1 - 1/v) / 2)
        E[h | y]      = P(active | y) * (c s2 / v) * y

    Only noise-scaled observations (unit noise variance) are supported.
    """
    if obs.noise_std == 0.0:
        raise DomainError("posterior mean needs a noisy observation")
    estimate = kernels.bg_posterior(
        np.ascontiguousarray(obs.samples, dtype=np.float64),
        params.k_d,
        obs.gain,
        params.activation_probability,
        1.0 / params.L,
    )
    support_tol = 0.5 / math.sqrt(params.L)
    support = np.flatnonzero(np.abs(estimate) > support_tol)
    return ChannelEstimate(estimate, support, Method.BG_POSTERIOR, support_tol=support_tol)


def _noise_floor(obs: FrequencyObservation, margin: float) -> float:
    m = obs.subset.m
    if obs.noise_std > 0:
        return obs.noise_std * math.sqrt(m) * (1.0 + margin)
    return 1e-9 * float(np.linalg.norm(obs.measurements))


def omp_recover(
    obs: FrequencyObservation,
    params: ModelParams,
    sparsity: int | None = None,
    noise_margin: float = 0.05,
) -> ChannelEstimate:
    """Orthogonal matching pursuit on the partial-DFT dictionary.

    Runs ``sparsity`` iterations (``params.L`` by default) or stops once the
    residual norm reaches the noise floor ``sqrt(m) * (1 + noise_margin)``.
    Pass ``sparsity=0`` for the unknown-sparsity mode, which relies on the
    residual rule alone.
    """
    if sparsity is None:
        sparsity = params.L
    if sparsity < 0:
        raise DomainError("sparsity must be non-negative")
    subset = obs.subset
    floor = _noise_floor(obs, noise_margin)
    support, coef, norms = kernels.omp(
        np.ascontiguousarray(obs.measurements, dtype=np.complex128),
        subset.indices.astype(np.int64),
        subset.k_c,
        params.k_d,
        sparsity if sparsity > 0 else -1,
        floor,
    )
    coef = coef / obs.gain
    estimate = np.zeros(subset.k_c)
    estimate[support] = coef.real
    order = np.argsort(support)
    return ChannelEstimate(
        estimate,
        support[order],
        Method.OMP,
        diagnostics={
            "residual_norms": norms,
            "iterations": int(support.size),
            "imag_residue": float(np.linalg.norm(coef.imag)),
            "rank_deficient": sparsity > subset.m,
        },
    )


class _PartialFourierOperator:
    """Real-input operator ``x -> gain * A x`` with ``A`` the partial DFT on k_d delays."""

    def __init__(self, subset, k_d, gain):
        self.indices = subset.indices
        self.k_c = subset.k_c
        self.k_d = k_d
        self.gain = gain

    def forward(self, x):
        padded = np.zeros(self.k_c, dtype=np.result_type(x, float))
        padded[: self.k_d] = x
        return self.gain * np.fft.fft(padded)[self.indices]

    def adjoint(self, r):
        spectrum = np.zeros(self.k_c, dtype=complex)
        spectrum[self.indices] = r
        return self.gain * self.k_c * np.fft.ifft(spectrum)[: self.k_d]

    def norm_squared(self, iterations=30):
        # power iteration on A^H A from a fixed start, so the bound is deterministic
        v = np.ones(self.k_d, dtype=complex) / math.sqrt(self.k_d)
        value = 0.0
        for _ in range(iterations):
            w = self.adjoint(self.forward(v))
            value = float(np.linalg.norm(w))
            if value == 0.0:
                return 0.0
            v = w / value
        return value


def iht_recover(
    obs: FrequencyObservation,
    params: ModelParams,
    sparsity: int | None = None,
    iterations: int = 100,
) -> ChannelEstimate:
    """Iterative hard thresholding with step ``1/||A||^2`` on the real-valued channel."""
    if iterations < 1:
        raise DomainError("iterations must be at least 1")
    if sparsity is None:
        sparsity = params.L
    op = _PartialFourierOperator(obs.subset, params.k_d, obs.gain)
    # 1% slack over the power-iteration estimate keeps the step strictly stable
    norm2 = op.norm_squared() * 1.01
    x = np.zeros(params.k_d)
    y = np.asarray(obs.measurements)
    if norm2 > 0 and sparsity > 0:
        step = 1.0 / norm2
        for _ in range(iterations):
            z = x + step * op.adjoint(y - op.forward(x)).real
            keep = np.argpartition(-np.abs(z), min(sparsity, params.k_d) - 1)[:sparsity]
            x = np.zeros(params.k_d)
            x[keep] = z[keep]
    estimate = np.zeros(obs.subset.k_c)
    estimate[: params.k_d] = x
    support = np.flatnonzero(x)
    return ChannelEstimate(
        estimate,
        support,
        Method.IHT,
        diagnostics={"step_norm_squared": norm2, "iterations": iterations},
    )


def evaluate_estimate(
    h: ChannelRealization, est: ChannelEstimate, support_tol: float | None = None
) -> EvaluationReport:
    if est.estimate.size != h.length:
        raise DomainError("estimate and channel lengths differ")
    tol = est.support_tol if support_tol is None else support_tol
    diff = h.dense() - est.estimate
    true_support = set(h.support[h.gains != 0].tolist())
    detected = set(np.flatnonzero(np.abs(est.estimate) > tol).tolist())
    hits = len(true_support & detected)
    precision = hits / len(detected) if detected else 1.0
    recall = hits / len(true_support) if true_support else 1.0
    return EvaluationReport(float(diff @ diff), precision, recall)
