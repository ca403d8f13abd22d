"""Channel parameters, random channel sampling and closed-form information quantities.

All information quantities are in nats.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


class GainModel(str, enum.Enum):
    CONSTANT = "constant"
    GAUSSIAN = "gaussian"


class SamplingMode(str, enum.Enum):
    BERNOULLI = "bernoulli"
    FIXED_COUNT = "fixed_count"


@dataclass(frozen=True)
class ModelParams:
    """Dimensions and statistics of the sparse multipath channel.

    Parameters
    ----------
    k_c : int
        Channel length (samples per coherence period).
    k_d : int
        Delay-spread length; only the first ``k_d`` taps may be active.
    L : int
        Expected number of active paths.
    gain_model : GainModel
        ``CONSTANT`` draws gains from {+1/sqrt(L), -1/sqrt(L)}, ``GAUSSIAN``
        from N(0, 1/L).
    sampling_mode : SamplingMode
        ``BERNOULLI`` activates each tap independently with probability
        L/k_d; ``FIXED_COUNT`` activates exactly L taps.
    """

    k_c: int
    k_d: int
    L: int
    gain_model: GainModel = GainModel.CONSTANT
    sampling_mode: SamplingMode = SamplingMode.BERNOULLI

    def __post_init__(self):
        for name in ("k_c", "k_d", "L"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise DomainError(f"{name} must be an integer, got {value!r}")
        if not 1 <= self.L <= self.k_d <= self.k_c:
            raise DomainError(
                f"need 1 <= L <= k_d <= k_c, got L={self.L}, k_d={self.k_d}, k_c={self.k_c}"
            )
        object.__setattr__(self, "gain_model", GainModel(self.gain_model))
        object.__setattr__(self, "sampling_mode", SamplingMode(self.sampling_mode))

    @property
    def activation_probability(self) -> float:
        return self.L / self.k_d

    def replace(self, **changes) -> "ModelParams":
        fields = dict(
            k_c=self.k_c,
            k_d=self.k_d,
            L=self.L,
            gain_model=self.gain_model,
            sampling_mode=self.sampling_mode,
        )
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class Seed:
    """Reproducible seed: a master value plus a derivation path.

    The random stream is a pure function of ``(master, path)``; derivation
    goes through :class:`numpy.random.SeedSequence` with the path as its
    spawn key.
    """

    master: int
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not 0 <= self.master < 2**64:
            raise DomainError(f"master seed must fit in 64 bits, got {self.master}")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, *labels: int) -> "Seed":
        return Seed(self.master, self.path + tuple(labels))

    def rng(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.master, spawn_key=self.path))
        )


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(int(seed))


@dataclass(frozen=True)
class ChannelRealization:
    """Sparse real channel: sorted support indices and aligned gains."""

    length: int
    support: np.ndarray
    gains: np.ndarray

    def dense(self) -> np.ndarray:
        h = np.zeros(self.length)
        h[self.support] = self.gains
        return h

    @property
    def energy(self) -> float:
        return float(np.sum(self.gains**2))

    @classmethod
    def from_dense(cls, h) -> "ChannelRealization":
        h = np.asarray(h, dtype=float)
        support = np.flatnonzero(h)
        return cls(len(h), support, h[support].copy())


def binary_entropy(p: float) -> float:
    """Binary entropy in nats, with 0 ln 0 taken as 0."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def sample_channel(params: ModelParams, seed) -> ChannelRealization:
    rng = as_seed(seed).rng()
    if params.sampling_mode is SamplingMode.FIXED_COUNT:
        support = np.sort(rng.choice(params.k_d, size=params.L, replace=False))
    else:
        active = rng.random(params.k_d) < params.activation_probability
        support = np.flatnonzero(active)
    scale = 1.0 / math.sqrt(params.L)
    if params.gain_model is GainModel.CONSTANT:
        gains = scale * rng.choice(np.array([-1.0, 1.0]), size=support.size)
    else:
        gains = scale * rng.standard_normal(support.size)
    return ChannelRealization(params.k_c, support.astype(np.intp), gains)


def rate_distortion(params: ModelParams) -> float:
    """Leading term k_d * H_b(L/k_d) of the channel's rate-distortion function."""
    return params.k_d * binary_entropy(params.activation_probability)


def snr_zero(params: ModelParams) -> float:
    """Critical per-sample SNR: total training energy k_c * snr_zero is the transition point."""
    return 2.0 * rate_distortion(params) / params.k_c


def detection_threshold(params: ModelParams) -> float:
    return math.sqrt(params.k_c * snr_zero(params) / params.L)


@dataclass(frozen=True)
class BaronBounds:
    min_measurements: int
    min_energy: float


def baron_bounds(params: ModelParams, snr: float) -> BaronBounds:
    """Measurement count and energy lower bounds for near-perfect recovery.

    ``min_measurements = ceil(R / (ln(1 + snr) / 2))`` and ``min_energy = 2 R``.
    """
    if not snr > 0:
        raise DomainError(f"snr must be positive, got {snr}")
    R = rate_distortion(params)
    return BaronBounds(
        min_measurements=math.ceil(R / (0.5 * math.log1p(snr))),
        min_energy=2.0 * R,
    )
