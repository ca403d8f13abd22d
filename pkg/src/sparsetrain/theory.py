"""Theoretical curves: MMSE versus SNR, training information, penalty bounds, measurement counts.

Information quantities are in nats. ``S0`` below denotes ``snr_zero(params)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError
from .model import GainModel, ModelParams, rate_distortion, snr_zero

DEFAULT_EPSILON = 0.25


@dataclass(frozen=True)
class TheoryCurve:
    snr_grid: np.ndarray
    values: np.ndarray
    label: str

    def __post_init__(self):
        grid = np.asarray(self.snr_grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.shape != values.shape:
            raise DomainError("grid and values must have equal lengths")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("snr grid must be strictly increasing")
        object.__setattr__(self, "snr_grid", grid)
        object.__setattr__(self, "values", values)


def _check_epsilon(epsilon):
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")


def mmse_hc_step(snr: float, params: ModelParams, epsilon: float = DEFAULT_EPSILON) -> float:
    """Step-shaped MMSE of the constant-magnitude channel.

    1 below ``(1-epsilon) S0``, 0 above ``(1+epsilon) S0``, linear in between.
    """
    _check_epsilon(epsilon)
    s0 = snr_zero(params)
    lo, hi = (1.0 - epsilon) * s0, (1.0 + epsilon) * s0
    if snr <= lo:
        return 1.0
    if snr >= hi:
        return 0.0
    return (hi - snr) / (hi - lo)


def _hg_cutoff(snr, s0):
    if snr <= 0:
        return math.inf
    return math.sqrt(s0 / snr)


def mmse_hg_theory(snr: float, params: ModelParams) -> float:
    """MMSE of the Gaussian-gain channel: the gain energy that stays below the detection threshold.

    Equals ``E[s^2; |s| < a]`` for a standard normal ``s`` and
    ``a = sqrt(S0 / snr)``, in closed form ``erf(a/sqrt2) - a sqrt(2/pi) exp(-a^2/2)``.
    """
    if snr < 0:
        raise DomainError(f"snr must be non-negative, got {snr}")
    a = _hg_cutoff(snr, snr_zero(params))
    if math.isinf(a):
        return 1.0
    return math.erf(a / math.sqrt(2.0)) - a * math.sqrt(2.0 / math.pi) * math.exp(-0.5 * a * a)


def mmse_hg_quadrature(snr: float, params: ModelParams) -> float:
    """Same curve as :func:`mmse_hg_theory` by numerical integration of ``s^2 phi(s)``."""
    a = _hg_cutoff(snr, snr_zero(params))
    if math.isinf(a):
        return 1.0
    value, _ = integrate.quad(
        lambda s: s * s * math.exp(-0.5 * s * s) / math.sqrt(2.0 * math.pi),
        0.0,
        a,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )
    return 2.0 * value


def mmse_theory(snr: float, params: ModelParams, model, epsilon: float = DEFAULT_EPSILON) -> float:
    if GainModel(model) is GainModel.CONSTANT:
        return mmse_hc_step(snr, params, epsilon)
    return mmse_hg_theory(snr, params)


def training_mutual_info(
    snr: float, params: ModelParams, model, epsilon: float = DEFAULT_EPSILON
) -> float:
    """Information the training gives about the channel, ``(k_c/2) * int_0^snr mmse(s) ds``.

    Capped at ``rate_distortion(params)``.
    """
    if snr < 0:
        raise DomainError(f"snr must be non-negative, got {snr}")
    if snr == 0:
        return 0.0
    s0 = snr_zero(params)
    breaks = [b for b in ((1 - epsilon) * s0, s0, (1 + epsilon) * s0) if 0 < b < snr]
    area, _ = integrate.quad(
        lambda s: mmse_theory(s, params, model, epsilon),
        0.0,
        snr,
        points=breaks or None,
        epsabs=0.0,
        epsrel=1e-10,
        limit=400,
    )
    return min(0.5 * params.k_c * area, rate_distortion(params))


@dataclass(frozen=True)
class PenaltyBound:
    penalty: float
    rdf_after: float


def penalty_bound(
    snr: float, params: ModelParams, model, epsilon: float = DEFAULT_EPSILON
) -> PenaltyBound:
    """Upper bound on the penalty term and on the rate-distortion function after training.

    Both are ``max(0, R - training_mutual_info)`` at this level of approximation.
    """
    remaining = max(0.0, rate_distortion(params) - training_mutual_info(snr, params, model, epsilon))
    return PenaltyBound(remaining, remaining)


@dataclass(frozen=True)
class RipCounts:
    harmonic_m: int
    gaussian_m: int


def rip_counts(params: ModelParams, c_harmonic: float = 1.0, c_gaussian: float = 1.0) -> RipCounts:
    """Measurement counts for RIP: ``c L ln(k_c) ln^4(L)`` (partial DFT) and ``c R`` (i.i.d. Gaussian).

    ``ln L`` is floored at 1 so that small ``L`` does not zero the count.
    """
    if not (c_harmonic > 0 and c_gaussian > 0):
        raise DomainError("RIP constants must be positive")
    log_L = max(1.0, math.log(params.L))
    harmonic = c_harmonic * params.L * math.log(params.k_c) * log_L**4
    return RipCounts(math.ceil(harmonic), math.ceil(c_gaussian * rate_distortion(params)))


@dataclass(frozen=True)
class FletcherComparison:
    k_c: int
    L: int
    snr: float
    fletcher_measurements: float
    fletcher_energy: float
    ours_measurements: float
    ours_energy: float

    @property
    def energy_ratio(self) -> float:
        return self.fletcher_energy / self.ours_energy


def fletcher_compare(params: ModelParams, snr: float, omega_constant: float = 1.0) -> FletcherComparison:
    """Measurement counts and training energies: exact pattern recovery versus near-perfect recovery.

    ``omega_constant`` scales the unspecified ``L ln(k_c/L)`` measurement order.
    """
    if not snr > 0:
        raise DomainError(f"snr must be positive, got {snr}")
    k_c, L = params.k_c, params.L
    if k_c == L:
        raise DomainError("comparison needs k_c > L")
    exact_energy = 8.0 * L * math.log(k_c - L)
    near_order = L * math.log(k_c / L)
    return FletcherComparison(
        k_c=k_c,
        L=L,
        snr=snr,
        fletcher_measurements=exact_energy * (1.0 + snr) / snr,
        fletcher_energy=exact_energy,
        ours_measurements=omega_constant * near_order,
        ours_energy=2.0 * near_order,
    )


def theory_curves(params: ModelParams, snr_grid, epsilon: float = DEFAULT_EPSILON) -> dict[str, TheoryCurve]:
    """MMSE, training information, penalty and RDF-ratio curves for both gain models."""
    grid = np.asarray(snr_grid, dtype=float)
    R = rate_distortion(params)
    curves = {}
    for model, tag in ((GainModel.CONSTANT, "hc"), (GainModel.GAUSSIAN, "hg")):
        mmse = [mmse_theory(s, params, model, epsilon) for s in grid]
        info = [training_mutual_info(s, params, model, epsilon) for s in grid]
        penalty = [max(0.0, R - i) for i in info]
        curves[f"mmse_{tag}"] = TheoryCurve(grid, mmse, f"mmse_{tag}")
        curves[f"mi_{tag}"] = TheoryCurve(grid, info, f"mi_{tag}")
        curves[f"penalty_{tag}"] = TheoryCurve(grid, penalty, f"penalty_{tag}")
        ratio = np.array(penalty) / R if R > 0 else np.zeros(grid.size)
        curves[f"rdf_ratio_{tag}"] = TheoryCurve(grid, ratio, f"rdf_ratio_{tag}")
    return curves
