import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cimris.channel import (ChannelRealization, NoiseModel, apply_channel, effective_gains,
                            max_snr, sample_realization)


def test_forced_unit_gain():
    r = ChannelRealization.from_gains([1 + 0j], [1 + 0j])
    assert r.effective_gain == 1.0


@given(st.integers(1, 64), st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_alignment_makes_response_real(N, seed):
    r = sample_realization(N, 1.0, np.random.default_rng(seed))
    resp = r.response()
    assert resp.real == pytest.approx(r.effective_gain, rel=1e-12)
    assert abs(resp.imag) < 1e-12 * max(r.effective_gain, 1e-300)
    assert r.effective_gain >= 0


def test_alignment_beats_random_phases():
    rng = np.random.default_rng(3)
    r = sample_realization(32, 1.0, rng)
    best = r.effective_gain
    for _ in range(1000):
        assert abs(r.response(rng.uniform(0, 2 * np.pi, 32))) <= best + 1e-12


def test_reflection_matrix_consistent():
    r = sample_realization(8, 1.0, np.random.default_rng(0))
    Phi = r.reflection_matrix()
    assert complex(r.h @ Phi @ r.g).real == pytest.approx(r.effective_gain)


@pytest.mark.parametrize("N", [16, 64, 256])
def test_clt_moments(N):
    rng = np.random.default_rng(N)
    A = np.concatenate([effective_gains(*(
        np.sqrt(0.5) * (rng.standard_normal((20000, N)) + 1j * rng.standard_normal((20000, N)))
        for _ in range(2))) for _ in range(5)])
    assert A.mean() == pytest.approx(0.25 * np.pi * N, rel=0.01)
    assert A.var() == pytest.approx((1 - 0.0625 * np.pi**2) * N, rel=0.03)


def test_max_snr():
    assert max_snr(1, 1, 1, 1) == 1
    assert max_snr(2, 32, 1, 0.5) == 256


def test_max_snr_mean_moment():
    N, K, n0 = 64, 32, 2.0
    rng = np.random.default_rng(11)
    h = np.sqrt(0.5) * (rng.standard_normal((100000, N)) + 1j * rng.standard_normal((100000, N)))
    g = np.sqrt(0.5) * (rng.standard_normal((100000, N)) + 1j * rng.standard_normal((100000, N)))
    got = max_snr(effective_gains(h, g), K, 1.0, n0).mean()
    expected = K * (0.0625 * np.pi**2 * N**2 + (1 - 0.0625 * np.pi**2) * N) / n0
    assert got == pytest.approx(expected, rel=0.005)


def test_apply_channel_noiseless():
    rng = np.random.default_rng(0)
    tx = np.array([1 + 1j, -1 + 0.5j, 0.2j, 3])
    off = NoiseModel(1.0, enabled=False)
    assert np.array_equal(apply_channel(tx, 1.0, off, rng), tx)
    assert np.allclose(apply_channel(tx, 3.7, off, rng), 3.7 * tx)
    with pytest.raises(ValueError):
        apply_channel(tx, 1.0, off, rng, K=8)


def test_noise_variance():
    rng = np.random.default_rng(5)
    tx = np.zeros(10**6, complex)
    n = apply_channel(tx, 2.0, NoiseModel(0.3), rng)
    assert np.var(n) == pytest.approx(0.3, rel=0.01)
    assert np.var(n.real) == pytest.approx(0.15, rel=0.01)
    assert abs(np.mean(n.real * n.imag)) < 1e-3


def test_parameter_validation():
    with pytest.raises(ValueError):
        NoiseModel(0.0)
    with pytest.raises(ValueError):
        sample_realization(0, 1.0, np.random.default_rng())
    with pytest.raises(ValueError):
        sample_realization(4, -1.0, np.random.default_rng())
