from fractions import Fraction
from math import comb, floor, log2, log10

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ofdmim import ConfigError, SchemeParams, papr_bound, papr_ccdf, spectral_efficiency


def test_published_spectral_efficiencies():
    im = SchemeParams("OFDM-IM", 128, 8, 4, n_group=16, k_active=12)
    sim = SchemeParams("SIM-OFDM", 128, 8, 4)
    assert spectral_efficiency(im) == 2
    assert float(spectral_efficiency(sim)) == pytest.approx(1.88, abs=0.005)
    assert spectral_efficiency(sim) == Fraction(32, 17)


@pytest.mark.parametrize("order", [2, 4, 16, 64, 256])
@pytest.mark.parametrize("n_cp", [0, 8, 16])
def test_sim_ofdm_equals_ofdm(order, n_cp):
    n_tot = 1024
    sim = SchemeParams("SIM-OFDM", n_tot, n_cp, order)
    ofdm = SchemeParams("OFDM", n_tot, n_cp, order)
    assert spectral_efficiency(sim) == spectral_efficiency(ofdm)


def test_full_activation_collapses_to_ofdm():
    for n in (1, 2, 4, 8, 16):
        im = SchemeParams("OFDM-IM", 128, 16, 4, n_group=n, k_active=n)
        assert spectral_efficiency(im) == spectral_efficiency(SchemeParams("OFDM", 128, 16, 4))


@settings(max_examples=100)
@given(st.integers(3, 10), st.integers(0, 64), st.sampled_from([2, 4, 16, 64]), st.data())
def test_im_se_against_direct_formula(log_n_tot, n_cp, order, data):
    n_tot = 1 << log_n_tot
    n = 1 << data.draw(st.integers(0, log_n_tot))
    k = data.draw(st.integers(1, n))
    direct = (n_tot // n) * (floor(log2(comb(n, k)) + 1e-12) + k * log2(order)) / (n_tot + n_cp)
    se = spectral_efficiency(SchemeParams("OFDM-IM", n_tot, n_cp, order, n, k))
    assert float(se) == pytest.approx(direct, rel=1e-12)


def test_papr_bound_values():
    assert round(papr_bound(SchemeParams("OFDM", 128, 16, 4)), 2) == 21.07
    assert round(papr_bound(SchemeParams("OFDM-IM", 128, 16, 4, 8, 6)), 2) == 19.82
    assert papr_bound(SchemeParams("SIM-OFDM", 128, 16, 4)) == pytest.approx(10 * log10(96))


@st.composite
def comparable_configs(draw):
    """OFDM-IM configs whose activity ratio K/N does not exceed SIM-OFDM's (M-1)/M."""
    n_tot = 1 << draw(st.integers(4, 11))
    order = draw(st.sampled_from([2, 4, 16, 64]))
    assume(order <= n_tot)
    n = 1 << draw(st.integers(1, n_tot.bit_length() - 1))
    k = draw(st.integers(1, n - 1))
    assume(k * order <= n * (order - 1))
    return n_tot, order, n, k


@settings(max_examples=200)
@given(comparable_configs())
def test_papr_ordering(cfg):
    n_tot, order, n, k = cfg
    im = papr_bound(SchemeParams("OFDM-IM", n_tot, 0, order, n, k))
    sim = papr_bound(SchemeParams("SIM-OFDM", n_tot, 0, order))
    ofdm = papr_bound(SchemeParams("OFDM", n_tot, 0, order))
    assert im <= sim + 1e-12 < ofdm


def test_papr_ordering_needs_comparable_activity():
    # K/N = 15/16 > 3/4: more active subcarriers than SIM-OFDM, so a higher bound
    im = papr_bound(SchemeParams("OFDM-IM", 128, 0, 4, 16, 15))
    assert im > papr_bound(SchemeParams("SIM-OFDM", 128, 0, 4))


def test_scheme_validation():
    with pytest.raises(ConfigError):
        SchemeParams("SIM-OFDM", 128, 8, 4, n_group=8)
    with pytest.raises(ConfigError):
        SchemeParams("OFDM-IM", 128, 8, 4, n_group=12, k_active=3)
    with pytest.raises(ConfigError):
        SchemeParams("OFDM-IM", 128, 8, 4, n_group=4, k_active=5)
    with pytest.raises(ConfigError):
        SchemeParams("QAM", 128, 8, 4)
    with pytest.raises(ConfigError):
        SchemeParams("OFDM", 128, 8, 6)


def test_ccdf_edges():
    s = np.array([3.0, 5.0, 7.0])
    np.testing.assert_allclose(papr_ccdf(s, [2.0, 3.0, 4.0, 7.0, 8.0]), [1, 2 / 3, 2 / 3, 0, 0])
    np.testing.assert_allclose(papr_ccdf([4.0], [3.9, 4.0, 4.1]), [1, 0, 0])
    with pytest.raises(ValueError):
        papr_ccdf([], [1.0])


@given(st.lists(st.floats(0, 30), min_size=1, max_size=50), st.lists(st.floats(-5, 35), min_size=2))
def test_ccdf_is_monotone(samples, thresholds):
    t = np.sort(thresholds)
    c = papr_ccdf(samples, t)
    assert np.all(np.diff(c) <= 0)
    assert np.all((0 <= c) & (c <= 1))
