import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsetrain import (
    DomainError,
    ModelParams,
    Seed,
    baron_bounds,
    binary_entropy,
    detection_threshold,
    rate_distortion,
    sample_channel,
    snr_zero,
)


def test_binary_entropy_values():
    assert binary_entropy(0.5) == pytest.approx(math.log(2), rel=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    # direct evaluation of -p ln p - (1-p) ln(1-p) at p = 1/256
    assert binary_entropy(1 / 256) == pytest.approx(0.025559460044, abs=1e-11)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_binary_entropy_domain(p):
    with pytest.raises(DomainError):
        binary_entropy(p)


@given(st.floats(0.0, 1.0))
def test_binary_entropy_symmetric_and_bounded(p):
    assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)
    assert 0.0 <= binary_entropy(p) <= math.log(2) + 1e-15


@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999), st.floats(0.0, 1.0))
def test_binary_entropy_concave(a, b, t):
    mid = binary_entropy(t * a + (1 - t) * b)
    assert mid >= t * binary_entropy(a) + (1 - t) * binary_entropy(b) - 1e-12


@pytest.mark.parametrize("bad", [dict(k_c=10, k_d=20, L=1), dict(k_c=10, k_d=5, L=0), dict(k_c=10, k_d=5, L=6)])
def test_params_invariants(bad):
    with pytest.raises(DomainError):
        ModelParams(**bad)


def test_p0_closed_forms(p0):
    assert snr_zero(p0) == pytest.approx(0.012779, abs=1e-6)
    assert rate_distortion(p0) == pytest.approx(104.69, abs=5e-3)
    assert detection_threshold(p0) == pytest.approx(3.6175, abs=1e-4)


def test_rate_distortion_small_p_expansion(p0):
    L, k_d = p0.L, p0.k_d
    assert rate_distortion(p0) == pytest.approx(L * (math.log(k_d / L) + 1), rel=0.02)


def test_degenerate_full_support():
    p = ModelParams(64, 16, 16)
    assert snr_zero(p) == 0.0
    assert rate_distortion(p) == 0.0


def test_snr_zero_scales_inversely_with_k_c(p0):
    assert snr_zero(p0.replace(k_c=2 * p0.k_c)) == pytest.approx(snr_zero(p0) / 2, rel=1e-14)


def test_threshold_independent_of_k_c(p0):
    expected = math.sqrt(2 * p0.k_d * binary_entropy(p0.L / p0.k_d) / p0.L)
    assert detection_threshold(p0) == pytest.approx(expected, rel=1e-14)
    assert detection_threshold(p0.replace(k_c=4 * p0.k_c)) == pytest.approx(expected, rel=1e-14)


def test_threshold_is_active_amplitude_at_critical_energy(p0):
    amplitude = math.sqrt(snr_zero(p0) * p0.k_c) / math.sqrt(p0.L)
    assert amplitude == pytest.approx(detection_threshold(p0), rel=1e-14)


def test_closed_forms_deterministic(p0):
    assert snr_zero(p0) == snr_zero(p0)
    assert detection_threshold(p0) == detection_threshold(p0)


def test_baron_bounds_example(p0):
    b = baron_bounds(p0, 1.0)
    assert b.min_measurements == 303
    assert b.min_energy == pytest.approx(2 * rate_distortion(p0))


def test_baron_bounds_small_snr_limit(p0):
    R = rate_distortion(p0)
    energy = baron_bounds(p0, 1e-6).min_measurements * 1e-6
    assert 2 * R <= energy <= 2 * R * (1 + 1e-5)


@given(
    st.integers(1, 64).flatmap(lambda L: st.tuples(st.just(L), st.integers(L, 512))),
    st.floats(1e-4, 100.0),
)
def test_baron_energy_never_below_bound(Lkd, snr):
    L, k_d = Lkd
    b = baron_bounds(ModelParams(2 * k_d, k_d, L), snr)
    assert b.min_measurements * snr >= b.min_energy * (1 - 1e-12)


@pytest.mark.parametrize("snr", [0.0, -1.0])
def test_baron_bounds_domain(p0, snr):
    with pytest.raises(DomainError):
        baron_bounds(p0, snr)


def test_full_support_constant_gains():
    params = ModelParams(128, 32, 32, gain_model="constant")
    h = sample_channel(params, 3)
    assert h.support.tolist() == list(range(32))
    np.testing.assert_allclose(np.abs(h.gains), 1 / math.sqrt(32))


def test_fixed_count_support_size(p0):
    for trial in range(50):
        h = sample_channel(p0, Seed(1, (trial,)))
        assert h.support.size == 16
        assert np.all(np.diff(h.support) > 0)
        assert h.support.max() < p0.k_d
        np.testing.assert_allclose(np.abs(h.gains), 0.25)


def test_bernoulli_support_size_mean():
    params = ModelParams(4096, 4096, 16, sampling_mode="bernoulli")
    sizes = np.array([sample_channel(params, Seed(9, (t,))).support.size for t in range(10_000)])
    p = 16 / 4096
    sigma = math.sqrt(4096 * p * (1 - p) / 10_000)
    assert abs(sizes.mean() - 16) < 3 * sigma


@pytest.mark.parametrize("gain_model", ["constant", "gaussian"])
def test_unit_expected_energy(gain_model):
    params = ModelParams(1024, 256, 8, gain_model=gain_model, sampling_mode="bernoulli")
    energies = np.array([sample_channel(params, Seed(4, (t,))).energy for t in range(10_000)])
    se = energies.std(ddof=1) / math.sqrt(energies.size)
    assert abs(energies.mean() - 1.0) < 3 * se


def test_seed_reproducible(p0):
    a = sample_channel(p0, Seed(5, (1, 2)))
    b = sample_channel(p0, Seed(5, (1, 2)))
    c = sample_channel(p0, Seed(5, (2, 1)))
    np.testing.assert_array_equal(a.support, b.support)
    np.testing.assert_array_equal(a.gains, b.gains)
    assert not np.array_equal(a.support, c.support)


def test_seed_range():
    with pytest.raises(DomainError):
        Seed(2**64)
