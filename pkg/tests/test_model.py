import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from iftem.model import (CUBIC_BSPLINE, DIRAC, RECT, FriSignal, PulseShape, eval_signal,
                         fsc, fsc_vector)

from conftest import random_signal


def test_fsc_single_dirac():
    sig = FriSignal(1.0, [1.0], [0.5])
    assert fsc(sig, 1) == pytest.approx(-1, abs=1e-14)
    assert fsc(sig, 2) == pytest.approx(1, abs=1e-14)


def test_fsc_symmetric_pair_cancels():
    sig = FriSignal(1.0, [1.0, 1.0], [0.25, 0.75])
    assert abs(fsc(sig, 1)) < 1e-15


def _periodised(sig, t):
    # sum over enough neighbouring periods to cover the pulse support
    reach = int(np.ceil(sig.shape.support / sig.period)) + 1
    x = np.zeros_like(t)
    for a, tau in zip(sig.amplitudes, sig.delays):
        for p in range(-reach, reach + 1):
            x += a * sig.shape(t - tau - p * sig.period)
    return x


@pytest.mark.parametrize("k", [1, 2, 5, 9])
def test_fsc_bspline_matches_quadrature(k):
    # unit knot spacing would zero every harmonic of a T = 1 signal, so use 0.1
    rng = np.random.default_rng(3)
    sig = random_signal(rng, 3, shape=PulseShape(CUBIC_BSPLINE, 0.1))
    n = 2 ** 16
    t = np.arange(n) / n
    # periodic C2 integrand: the rectangle rule is spectrally accurate
    ref = np.mean(_periodised(sig, t) * np.exp(-2j * np.pi * k * t))
    assert abs(fsc(sig, k) - ref) < 1e-8


def test_fsc_rect_matches_quad():
    sig = FriSignal(1.0, [1.5, -0.7], [0.3, 0.8], PulseShape(RECT, 0.1))
    for k in (1, 3, 4):
        edges = sorted({(tau + s * 0.05) % 1.0 for tau in sig.delays for s in (-1, 1)})
        re = integrate.quad(lambda t: _periodised(sig, np.array([t]))[0] * np.cos(2 * np.pi * k * t),
                            0, 1, points=edges, limit=200)[0]
        im = integrate.quad(lambda t: -_periodised(sig, np.array([t]))[0] * np.sin(2 * np.pi * k * t),
                            0, 1, points=edges, limit=200)[0]
        assert abs(fsc(sig, k) - complex(re, im)) < 1e-10


def test_unit_bspline_transform_limit():
    h = PulseShape(CUBIC_BSPLINE)
    assert h.ft(0.0) == 1.0
    w = 0.7
    assert h.ft(w) == pytest.approx((np.sin(w / 2) / (w / 2)) ** 4, rel=1e-14)
    r = PulseShape(RECT, 0.2)
    assert r.ft(3.0) == pytest.approx(0.2 * np.sin(0.3) / 0.3, rel=1e-14)


def test_eval_zero_signal():
    sig = FriSignal(1.0, [0.0], [0.4])
    assert np.all(eval_signal(sig, np.linspace(0, 1, 17), 20) == 0)


def test_eval_rect_mid_pulse():
    sig = FriSignal(1.0, [2.0], [0.5], PulseShape(RECT, 0.2))
    # direct time-domain value at the pulse centre is the amplitude
    assert eval_signal(sig, 0.5, 200) == pytest.approx(2.0, rel=0.01)


def test_eval_periodic():
    sig = random_signal(np.random.default_rng(0), 4)
    t = np.linspace(0, 1, 50)
    assert np.allclose(eval_signal(sig, t, 30), eval_signal(sig, t + 1.0, 30), atol=1e-12, rtol=0)


def test_signal_validation():
    with pytest.raises(ValueError):
        FriSignal(1.0, [1, 1], [0.3, 0.3])
    with pytest.raises(ValueError):
        FriSignal(1.0, [1], [0.0])
    with pytest.raises(ValueError):
        FriSignal(1.0, [1], [1.2])
    with pytest.raises(ValueError):
        PulseShape("gauss")
    sig = FriSignal(1.0, [1], [1.0])
    assert sig.rate_of_innovation == 2.0


def test_config_roundtrip():
    sig = FriSignal(2.0, [1.0, -0.5], [0.3, 1.9], PulseShape(RECT, 0.1))
    again = FriSignal.from_dict(sig.to_dict())
    assert np.array_equal(again.delays, sig.delays)
    assert again.shape == sig.shape


signals = st.builds(
    lambda seed, L, kind: random_signal(
        np.random.default_rng(seed), L,
        shape=PulseShape(kind, 0.05) if kind != DIRAC else PulseShape()),
    st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.sampled_from([DIRAC, CUBIC_BSPLINE, RECT]))


@settings(max_examples=60, deadline=None)
@given(signals, st.integers(1, 40))
def test_conjugate_symmetry(sig, k):
    assert abs(fsc(sig, -k) - np.conj(fsc(sig, k))) < 1e-14


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    s1, s2 = random_signal(rng, 2), random_signal(rng, 3)
    both = FriSignal(1.0, np.r_[s1.amplitudes, s2.amplitudes], np.r_[s1.delays, s2.delays])
    ks = np.arange(-8, 9)
    assert np.allclose(fsc_vector(both, ks), fsc_vector(s1, ks) + fsc_vector(s2, ks),
                       atol=1e-14, rtol=0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(-50, 50))
def test_dirac_magnitude_bound(seed, k):
    sig = random_signal(np.random.default_rng(seed), 5)
    assert abs(fsc(sig, k)) <= np.sum(np.abs(sig.amplitudes)) / sig.period + 1e-14
