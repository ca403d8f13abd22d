"""Deterministic Monte-Carlo harness: trials, SNR sweeps, empirical curves.

Every trial draws its randomness from ``Seed(master_seed, (snr_index, trial_index, stream))``
where ``stream`` is 0 for the channel, 1 for the noise and 2 for the frequency
subset. Trials are therefore reproducible in isolation and sweeps do not
depend on scheduling.
"""
from __future__ import annotations

import enum
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import estimators as est
from .errors import ConfigError, DomainError
from .model import GainModel, ModelParams, SamplingMode, Seed, rate_distortion, sample_channel, snr_zero
from .signals import frequency_observe, impulse_observe, sample_frequency_subset
from .theory import DEFAULT_EPSILON, TheoryCurve, rip_counts

MSE_ANOMALY = 2.0


class Scheme(str, enum.Enum):
    IMPULSE = "impulse"
    FREQUENCY = "frequency"


_SCHEME_METHODS = {
    Scheme.IMPULSE: {est.Method.THRESHOLD, est.Method.BG_POSTERIOR},
    Scheme.FREQUENCY: {est.Method.OMP, est.Method.IHT},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: channel model, training scheme, estimator and SNR grid.

    ``snr_grid`` holds multiples of SNR0 when ``snr_relative`` is true and
    absolute per-sample SNRs otherwise. For frequency training, ``m`` fixes
    the number of harmonics; when it is None, ``m`` comes from the harmonic
    RIP count with constant ``c_harmonic`` (capped at k_c).
    """

    params: ModelParams
    scheme: Scheme = Scheme.IMPULSE
    estimator: est.Method = est.Method.THRESHOLD
    snr_grid: tuple = (1.0,)
    snr_relative: bool = True
    trials_per_point: int = 100
    master_seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    m: int | None = None
    c_harmonic: float = 1.0
    sparsity: int | None = None
    iht_iterations: int = 100
    noiseless: bool = False

    def __post_init__(self):
        try:
            scheme = Scheme(self.scheme)
        except ValueError:
            raise ConfigError("scheme", f"unknown scheme {self.scheme!r}") from None
        try:
            method = est.Method(self.estimator)
        except ValueError:
            raise ConfigError("estimator", f"unknown estimator {self.estimator!r}") from None
        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "estimator", method)
        if method not in _SCHEME_METHODS[scheme]:
            raise ConfigError("estimator", f"{method.value} does not apply to {scheme.value} training")
        grid = tuple(float(s) for s in self.snr_grid)
        if not grid:
            raise ConfigError("snr_grid", "must not be empty")
        if any(not (s > 0 and math.isfinite(s)) for s in grid):
            raise ConfigError("snr_grid", "entries must be positive and finite")
        if len(set(grid)) != len(grid):
            raise ConfigError("snr_grid", "entries must be distinct")
        object.__setattr__(self, "snr_grid", tuple(sorted(grid)))
        if isinstance(self.trials_per_point, bool) or int(self.trials_per_point) != self.trials_per_point or self.trials_per_point < 1:
            raise ConfigError("trials_per_point", f"must be an integer >= 1, got {self.trials_per_point!r}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed", "must be a 64-bit unsigned integer")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon", "must lie in (0, 1)")
        if self.m is not None and not 1 <= self.m <= self.params.k_c:
            raise ConfigError("m", f"must lie in [1, k_c={self.params.k_c}]")
        if self.c_harmonic <= 0:
            raise ConfigError("c_harmonic", "must be positive")
        if self.sparsity is not None and self.sparsity < 0:
            raise ConfigError("sparsity", "must be non-negative")
        if self.iht_iterations < 1:
            raise ConfigError("iht_iterations", "must be >= 1")
        if method is est.Method.BG_POSTERIOR and self.noiseless:
            raise ConfigError("noiseless", "posterior mean needs noise")

    @property
    def snr_values(self) -> np.ndarray:
        grid = np.array(self.snr_grid)
        return grid * snr_zero(self.params) if self.snr_relative else grid

    @property
    def measurements(self) -> int:
        if self.m is not None:
            return self.m
        return min(self.params.k_c, rip_counts(self.params, self.c_harmonic).harmonic_m)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {
                "k_c": p.k_c,
                "k_d": p.k_d,
                "L": p.L,
                "gain_model": p.gain_model.value,
                "sampling_mode": p.sampling_mode.value,
            },
            "scheme": self.scheme.value,
            "estimator": self.estimator.value,
            "snr_grid": list(self.snr_grid),
            "snr_relative": self.snr_relative,
            "trials_per_point": self.trials_per_point,
            "master_seed": self.master_seed,
            "epsilon": self.epsilon,
            "m": self.m,
            "c_harmonic": self.c_harmonic,
            "sparsity": self.sparsity,
            "iht_iterations": self.iht_iterations,
            "noiseless": self.noiseless,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config", "must be a JSON object")
        known = set(cls.__dataclass_fields__)
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown configuration field")
        raw = data.get("params")
        if not isinstance(raw, dict):
            raise ConfigError("params", "missing or not an object")
        for key in raw:
            if key not in {"k_c", "k_d", "L", "gain_model", "sampling_mode"}:
                raise ConfigError(f"params.{key}", "unknown parameter")
        for key in ("k_c", "k_d", "L"):
            if key not in raw:
                raise ConfigError(f"params.{key}", "missing")
            if isinstance(raw[key], bool) or not isinstance(raw[key], int):
                raise ConfigError(f"params.{key}", f"must be an integer, got {raw[key]!r}")
        try:
            gain = GainModel(raw.get("gain_model", "constant"))
        except ValueError:
            raise ConfigError("params.gain_model", f"unknown gain model {raw.get('gain_model')!r}") from None
        try:
            mode = SamplingMode(raw.get("sampling_mode", "bernoulli"))
        except ValueError:
            raise ConfigError("params.sampling_mode", f"unknown sampling mode {raw.get('sampling_mode')!r}") from None
        try:
            params = ModelParams(raw["k_c"], raw["k_d"], raw["L"], gain, mode)
        except DomainError as exc:
            raise ConfigError("params", str(exc)) from None
        kwargs = {k: v for k, v in data.items() if k != "params"}
        numeric = {
            "trials_per_point": int,
            "master_seed": int,
            "epsilon": (int, float),
            "m": (int, type(None)),
            "c_harmonic": (int, float),
            "sparsity": (int, type(None)),
            "iht_iterations": int,
            "snr_relative": bool,
            "noiseless": bool,
        }
        for key, kinds in numeric.items():
            if key in kwargs:
                value = kwargs[key]
                bad_bool = isinstance(value, bool) and kinds is not bool
                if bad_bool or not isinstance(value, kinds):
                    raise ConfigError(key, f"has the wrong type: {value!r}")
        if "snr_grid" in kwargs:
            grid = kwargs["snr_grid"]
            if not isinstance(grid, list) or any(isinstance(s, bool) or not isinstance(s, (int, float)) for s in grid):
                raise ConfigError("snr_grid", "must be a list of numbers")
            kwargs["snr_grid"] = tuple(grid)
        return cls(params=params, **kwargs)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepPoint:
    snr: float
    snr_relative: float
    mean_mse: float
    std_err: float
    mean_precision: float
    mean_recall: float
    n_trials: int

    @property
    def anomalous(self) -> bool:
        return self.mean_mse > MSE_ANOMALY


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    config_hash: str | None = None
    seed: int | None = None
    per_trial_mse: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def snr(self) -> np.ndarray:
        return np.array([p.snr for p in self.points])

    @property
    def mean_mse(self) -> np.ndarray:
        return np.array([p.mean_mse for p in self.points])

    @property
    def std_err(self) -> np.ndarray:
        return np.array([p.std_err for p in self.points])


def run_trial(config: ExperimentConfig, snr_index: int, trial_index: int) -> est.EvaluationReport:
    if not 0 <= snr_index < len(config.snr_grid):
        raise DomainError(f"snr_index {snr_index} out of range")
    if not 0 <= trial_index < config.trials_per_point:
        raise DomainError(f"trial_index {trial_index} out of range")
    params = config.params
    snr = float(config.snr_values[snr_index])
    seed = Seed(int(config.master_seed), (snr_index, trial_index))
    h = sample_channel(params, seed.child(0))
    if config.scheme is Scheme.IMPULSE:
        obs = impulse_observe(h, snr, seed.child(1), noiseless=config.noiseless)
        if config.estimator is est.Method.THRESHOLD:
            estimate = est.threshold_detect(obs, params)
        else:
            estimate = est.bg_posterior_mean(obs, params)
    else:
        subset = sample_frequency_subset(params.k_c, config.measurements, seed.child(2))
        obs = frequency_observe(h, snr, subset, seed.child(1), noiseless=config.noiseless)
        if config.estimator is est.Method.OMP:
            estimate = est.omp_recover(obs, params, config.sparsity)
        else:
            estimate = est.iht_recover(obs, params, config.sparsity, config.iht_iterations)
    return est.evaluate_estimate(h, estimate)


def _run_block(config, snr_index, start, stop):
    out = np.empty((stop - start, 3))
    for row, trial in enumerate(range(start, stop)):
        report = run_trial(config, snr_index, trial)
        out[row] = (report.squared_error, report.support_precision, report.support_recall)
    return snr_index, start, out


def default_workers() -> int:
    """Worker count from ``SPARSETRAIN_THREADS``; 0 or unset means one per CPU."""
    raw = os.environ.get("SPARSETRAIN_THREADS", "").strip()
    try:
        cap = int(raw) if raw else 0
    except ValueError:
        cap = 0
    return cap if cap > 0 else (os.cpu_count() or 1)


def run_sweep(config: ExperimentConfig, workers: int | None = None, block_size: int = 25) -> SweepResult:
    """Evaluate every (snr, trial) pair and aggregate per SNR point.

    Results land in pre-allocated slots indexed by (snr_index, trial_index),
    so the output is identical for any worker count.
    """
    if workers is None:
        workers = default_workers()
    n_snr, n_trials = len(config.snr_grid), config.trials_per_point
    records = np.empty((n_snr, n_trials, 3))
    blocks = [
        (i, start, min(start + block_size, n_trials))
        for i in range(n_snr)
        for start in range(0, n_trials, block_size)
    ]
    if workers <= 1:
        results = (_run_block(config, *b) for b in blocks)
        for snr_index, start, out in results:
            records[snr_index, start : start + len(out)] = out
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, config, *b) for b in blocks]
            for future in futures:
                snr_index, start, out = future.result()
                records[snr_index, start : start + len(out)] = out

    s0 = snr_zero(config.params)
    snr_values = config.snr_values
    points = []
    for i in range(n_snr):
        mse = records[i, :, 0]
        std_err = float(np.std(mse, ddof=1) / math.sqrt(n_trials)) if n_trials > 1 else 0.0
        points.append(
            SweepPoint(
                snr=float(snr_values[i]),
                snr_relative=float(snr_values[i] / s0) if s0 > 0 else math.inf,
                mean_mse=float(np.mean(mse)),
                std_err=std_err,
                mean_precision=float(np.mean(records[i, :, 1])),
                mean_recall=float(np.mean(records[i, :, 2])),
                n_trials=n_trials,
            )
        )
    return SweepResult(tuple(points), config.digest(), int(config.master_seed), records[:, :, 0].copy())


def locate_transition(snr, mean_mse, level: float = 0.5) -> float | None:
    """SNR where the curve first crosses ``level`` from above, by linear interpolation.

    Returns None when the curve does not cross ``level`` inside the grid.
    """
    snr = np.asarray(snr, dtype=float)
    mse = np.asarray(mean_mse, dtype=float)
    for i in range(len(snr) - 1):
        if mse[i] >= level > mse[i + 1]:
            frac = (mse[i] - level) / (mse[i] - mse[i + 1])
            return float(snr[i] + frac * (snr[i + 1] - snr[i]))
    return None


@dataclass(frozen=True)
class EmpiricalInformation:
    """Cumulative training information and penalty curves estimated from an MSE sweep.

    ``uncapped`` keeps the raw integral; ``mutual_info`` is capped at R.
    ``penalty_sigma`` is one standard error of the penalty, propagated from the
    per-point MSE standard errors through the trapezoid weights.
    """

    mutual_info: TheoryCurve
    penalty: TheoryCurve
    uncapped: np.ndarray
    penalty_sigma: np.ndarray
    grid_warning: bool


def empirical_mutual_info(snr, mean_mse, params: ModelParams, std_err=None) -> EmpiricalInformation:
    """Integrate ``(k_c/2) * mse`` over SNR with the trapezoid rule.

    The integral starts at snr = 0, holding the first MSE value constant down
    to zero; ``grid_warning`` is set when the first grid point exceeds 0.05 S0.
    """
    snr = np.asarray(snr, dtype=float)
    mse = np.asarray(mean_mse, dtype=float)
    se = np.zeros_like(mse) if std_err is None else np.asarray(std_err, dtype=float)
    s0 = snr_zero(params)
    R = rate_distortion(params)
    x = np.concatenate(([0.0], snr))
    y = np.concatenate(([mse[0]], mse))
    half = 0.5 * params.k_c
    widths = np.diff(x)
    uncapped = half * np.cumsum(0.5 * widths * (y[:-1] + y[1:]))
    # weight of each grid point's MSE in the cumulative trapezoid up to point j
    var = np.zeros(snr.size)
    weights = np.zeros(snr.size)
    for j in range(snr.size):
        weights[j] += 0.5 * widths[j]
        if j == 0:
            weights[0] += 0.5 * widths[0]
        else:
            weights[j - 1] += 0.5 * widths[j]
        var[j] = np.sum((half * weights * se) ** 2)
    info = np.minimum(uncapped, R)
    penalty = np.maximum(0.0, R - info)
    return EmpiricalInformation(
        mutual_info=TheoryCurve(snr, info, "empirical_mi"),
        penalty=TheoryCurve(snr, penalty, "empirical_penalty"),
        uncapped=uncapped,
        penalty_sigma=np.sqrt(var),
        grid_warning=bool(snr[0] > 0.05 * s0),
    )
