import numpy as np
import pytest

from iftem.encoder import design_params, encode
from iftem.kernel import SosKernel, filter_signal
from iftem.model import CUBIC_BSPLINE, FriSignal, PulseShape

T = 1.0


def random_signal(rng, L, period=T, shape=None, min_sep=0.02, amp=(-1, 1), min_abs=0.1):
    shape = shape or PulseShape()
    while True:
        tau = period - rng.uniform(0, period, L)
        s = np.sort(tau)
        if L == 1 or np.diff(np.concatenate([s, [s[0] + period]])).min() >= min_sep * period:
            break
    a = rng.uniform(*amp, L)
    a = np.where(np.abs(a) < min_abs, np.sign(a + 1e-300) * min_abs, a)
    return FriSignal(period, a, tau, shape)


def encoded(sig, K, bias_factor=4.0, margin=1.05, **kw):
    f = filter_signal(sig, SosKernel.for_period(K, sig.period))
    p = design_params(f.bound_c, K, sig.period, bias_factor, 1.0, margin)
    return f, encode(f, p, **kw)


@pytest.fixture
def five_diracs():
    # L = 5 Diracs on the 0.05 grid, amplitudes in [-1, 1]
    rng = np.random.default_rng(5)
    tau = (rng.choice(20, 5, replace=False) + 1) * 0.05
    return FriSignal(T, rng.uniform(-1, 1, 5), tau)


@pytest.fixture
def bspline_signal():
    rng = np.random.default_rng(11)
    return random_signal(rng, 3, shape=PulseShape(CUBIC_BSPLINE, 0.02), amp=(1, 5))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT:
            terminalreporter.write_line(line)
