import numpy as np
import pytest

from conftest import crandn
from ofdmim import ChannelRealization, apply_downlink, apply_uplink, draw_channel, to_freq_domain, to_time_domain
from ofdmim.channel import complex_normal, propagate, tapped_delay_line


def identity_channel(n, n_tot):
    taps = np.eye(n, dtype=complex)[..., None]
    return ChannelRealization.from_taps(taps, n_tot)


def test_single_tap_is_flat(rng):
    ch = draw_channel(rng, 1, 2, 3, 64)
    np.testing.assert_allclose(ch.freq, np.broadcast_to(ch.freq[0], ch.freq.shape), atol=1e-15)


def test_freq_is_dft_of_taps(rng):
    ch = draw_channel(rng, 8, 2, 2, 128)
    n = np.arange(128)
    for k in (0, 17, 127):
        expected = np.sum(ch.taps * np.exp(-2j * np.pi * k * np.arange(8) / 128), axis=-1)
        np.testing.assert_allclose(ch.freq[k], expected, atol=1e-12)
    assert ch.freq.shape == (128, 2, 2) and n.size == ch.n_tot


def test_unit_variance_per_subcarrier():
    rng = np.random.default_rng(7)
    draws = np.stack([draw_channel(rng, 8, 2, 2, 32).freq for _ in range(25_000)])
    var = np.mean(np.abs(draws) ** 2, axis=(0, 2, 3))  # 10^5 entries per subcarrier
    assert np.all(np.abs(var - 1.0) < 0.02)


def test_same_seed_same_realization():
    a = draw_channel(np.random.default_rng(3), 8, 2, 2, 128)
    b = draw_channel(np.random.default_rng(3), 8, 2, 2, 128)
    np.testing.assert_array_equal(a.taps, b.taps)
    np.testing.assert_array_equal(a.freq, b.freq)


def test_uplink_identity_noiseless(rng):
    x = crandn(rng, 1, 2, 16)
    y = apply_uplink([identity_channel(2, 16)], x)
    np.testing.assert_array_equal(y, x[0])


def test_uplink_two_user_superposition():
    # hand-sized instance: 2 single-antenna users, 2 receive antennas, flat channel
    h1 = np.array([[1 + 1j], [2]])
    h2 = np.array([[0.5], [-1j]])
    users = [ChannelRealization.from_taps(h[..., None], 4) for h in (h1, h2)]
    x = np.array([[[1, -1, 1j, 0]], [[2, 0, 1, -1j]]])
    y = apply_uplink(users, x)
    for n in range(4):
        expected = h1[:, 0] * x[0, 0, n] + h2[:, 0] * x[1, 0, n]
        np.testing.assert_allclose(y[:, n], expected)


def test_uplink_pure_noise_variance(rng):
    ch = [draw_channel(rng, 8, 4, 1, 128) for _ in range(2)]
    y = np.concatenate([apply_uplink(ch, np.zeros((2, 1, 128)), 0.3, rng) for _ in range(200)])
    assert np.var(y) == pytest.approx(0.3, rel=0.02)


def test_downlink_identity_and_broadcast(rng):
    x = crandn(rng, 2, 16)
    y = apply_downlink([identity_channel(2, 16)], x)
    np.testing.assert_array_equal(y[0], x)
    g1, g2 = np.array([[1, 2j]]), np.array([[-1, 0.5]])
    users = [ChannelRealization.from_taps(g[..., None], 16) for g in (g1, g2)]
    y = apply_downlink(users, x)
    np.testing.assert_allclose(y[0, 0], g1[0] @ x)
    np.testing.assert_allclose(y[1, 0], g2[0] @ x)


def test_downlink_pure_noise_variance(rng):
    users = [draw_channel(rng, 8, 1, 2, 128) for _ in range(2)]
    y = np.concatenate([apply_downlink(users, np.zeros((2, 128)), 0.5, rng) for _ in range(200)])
    assert np.var(y) == pytest.approx(0.5, rel=0.02)


def test_time_domain_matches_per_subcarrier_model(rng):
    for _ in range(20):
        ch = draw_channel(rng, 8, 3, 2, 128)
        x = crandn(rng, 2, 128)
        s = to_time_domain(x, 16)
        y_time = to_freq_domain(tapped_delay_line(ch.taps, s), 128, 16)
        np.testing.assert_allclose(y_time, propagate(ch.freq, x), atol=1e-9)


def test_short_cyclic_prefix_breaks_equivalence(rng):
    ch = draw_channel(rng, 8, 1, 1, 64)
    x = crandn(rng, 1, 64)
    y_time = to_freq_domain(tapped_delay_line(ch.taps, to_time_domain(x, 2)), 64, 2)
    assert np.max(np.abs(y_time - propagate(ch.freq, x))) > 1e-3


def test_noise_is_white(rng):
    w = complex_normal(rng, (20_000, 4, 8), 1.0).reshape(20_000, -1)
    cov = w.conj().T @ w / w.shape[0]
    off = cov - np.diag(np.diag(cov))
    assert np.max(np.abs(off)) < 0.05
    np.testing.assert_allclose(np.diag(cov).real, 1.0, atol=0.05)


def test_dimension_mismatch(rng):
    ch = draw_channel(rng, 2, 2, 1, 16)
    with pytest.raises(ValueError):
        apply_uplink([ch], np.zeros((1, 2, 16)))
    with pytest.raises(ValueError):
        apply_uplink([ch, ch], np.zeros((1, 1, 16)))
