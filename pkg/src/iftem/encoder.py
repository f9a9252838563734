"""
Event-driven integrate-and-fire time encoding machine (IF-TEM).

Given y(t), bias b, scale kappa and threshold delta, the next firing instant
t_{n+1} solves

    (1/kappa) * integral_{t_n}^{t_{n+1}} (y(s) + b) ds = delta.

With |y| <= c < b the root is bracketed by

    kappa*delta/(b + c) <= t_{n+1} - t_n <= kappa*delta/(b - c)

and the integrand is positive, so bisection always converges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from .errors import BiasTooSmall, BracketFailure
from .kernel import antiderivative_Y, max_abs

__all__ = ["TemParams", "FiringTrace", "encode", "measurements", "add_jitter",
           "check_rate", "design_params", "spacing_bounds",
           "SIMULATED", "JITTERED", "INGESTED"]

SIMULATED = "simulated"
JITTERED = "jittered"
INGESTED = "ingested"

# bisection budget per firing instant
_MAX_ITER = 60


@dataclass(frozen=True)
class TemParams:
    bias_b: float
    kappa: float
    delta: float

    def __post_init__(self):
        if not (self.kappa > 0 and self.delta > 0):
            raise ValueError("kappa and delta must be positive")

    @property
    def kappa_delta(self):
        return self.kappa * self.delta

    def to_dict(self):
        return {"bias_b": self.bias_b, "kappa": self.kappa, "delta": self.delta}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["bias_b"]), float(d["kappa"]), float(d["delta"]))


@dataclass(frozen=True)
class FiringTrace:
    """
    Strictly increasing firing instants with the parameters that produced them.

    `sigma` is the jitter level for jittered traces and 0 otherwise; `bound_c`
    records the amplitude bound used at encode time when known.
    """

    times: np.ndarray
    params: TemParams
    provenance: str = SIMULATED
    sigma: float = 0.0
    bound_c: float | None = None

    def __post_init__(self):
        t = np.array(self.times, dtype=float).ravel()
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("firing times must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    def __len__(self):
        return self.times.size

    def metadata(self):
        return {"params": self.params.to_dict(), "provenance": self.provenance,
                "sigma_s": self.sigma, "bound_c": self.bound_c}


def spacing_bounds(params, c):
    """Lower and upper limits on consecutive firing gaps."""
    kd = params.kappa_delta
    return kd / (params.bias_b + c), kd / (params.bias_b - c)


def _encode(f, params, t_start, t_end, c):
    # With an ideal reset the n-th firing solves G(t) = G(t_start) + n kappa delta
    # for G(t) = b t + Y(t), which is the per-interval equation summed over n.
    # That lets all firings be bisected at once inside their spacing brackets.
    b, kd = params.bias_b, params.kappa_delta
    xtol = 1e-12 * f.period
    n = np.arange(1, int(np.floor((t_end - t_start) * (b + c) / kd)) + 2)
    lo = t_start + n * (kd / (b + c))
    hi = t_start + n * (kd / (b - c))
    keep = lo <= t_end
    n, lo, hi = n[keep], lo[keep], hi[keep]
    if n.size == 0:
        return np.empty(0)

    def F(t):
        # relative to t_start to keep G well scaled
        return b * (t - t_start) + antiderivative_Y(f, t) - antiderivative_Y(f, t_start) - n * kd

    slack = 1e-12 * kd * n
    f_lo, f_hi = F(lo), F(hi)
    if np.any(f_lo > slack) or np.any(f_hi < -slack):
        raise BracketFailure(f"firing equation not bracketed (c={c!r} too small?)")
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        up = F(mid) > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.max(hi - lo) <= xtol:
            break
    # end-point roots (e.g. a zero signal) collapse the bracket exactly
    t = np.where(f_lo >= 0, lo, np.where(f_hi <= 0, hi, 0.5 * (lo + hi)))
    return t[t <= t_end]


def encode(f, params, t_start=0.0, t_end=None):
    """
    Firing instants of the IF-TEM driven by `f` on (t_start, t_end].

    The integrator starts empty at `t_start`; no firing is emitted there.
    `t_end` defaults to one period after `t_start`.
    """
    if t_end is None:
        t_end = t_start + f.period
    c = f.bound_c
    if params.bias_b <= c:
        raise BiasTooSmall(f"bias {params.bias_b!r} <= bound {c!r}")
    try:
        times = _encode(f, params, t_start, t_end, c)
    except BracketFailure:
        # recompute c on a finer grid and retry once
        c = max(c, max_abs(f, grid_points=200_000, refine=64)) * (1 + 1e-9)
        if params.bias_b <= c:
            raise BiasTooSmall(f"bias {params.bias_b!r} <= bound {c!r}")
        times = _encode(f, params, t_start, t_end, c)
    return FiringTrace(np.array(times), params, SIMULATED, 0.0, c)


def measurements(trace):
    """Integrals of y between consecutive firings: -b (t_{n+1} - t_n) + kappa delta."""
    t = trace.times
    if t.size < 2:
        raise ValueError("need at least two firing times")
    p = trace.params
    return -p.bias_b * np.diff(t) + p.kappa_delta


def add_jitter(trace, sigma, seed):
    """
    Perturb each firing time by i.i.d. Uniform[-sigma/2, sigma/2] noise.

    Reordered instants are sorted; exact ties are left to the decoder.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return FiringTrace(trace.times, trace.params, JITTERED, 0.0, trace.bound_c)
    rng = np.random.default_rng(seed)
    eps = rng.uniform(-sigma / 2, sigma / 2, size=trace.times.size)
    t = np.sort(trace.times + eps)
    # ties after sorting are measure-zero; nudge them so the trace stays valid
    for i in range(1, t.size):
        if t[i] <= t[i - 1]:
            t[i] = np.nextafter(t[i - 1], np.inf)
    return FiringTrace(t, trace.params, JITTERED, float(sigma), trace.bound_c)


def check_rate(params, c, K, T):
    """
    Minimum-rate condition (b - c)/(kappa delta) >= (2K + 2)/T.

    Returns ``(ok, margin)`` with margin the ratio of the two sides.
    """
    if params.bias_b <= c:
        return False, 0.0
    margin = ((params.bias_b - c) / params.kappa_delta) / ((2 * K + 2) / T)
    return bool(margin >= 1.0), float(margin)


def design_params(c, K, T, bias_factor=2.5, kappa=1.0, margin=1.1):
    """
    TEM parameters with b = bias_factor * c and delta meeting the rate
    condition with the requested margin (>= 1).

    A zero bound falls back to b = 1 since any positive bias then works.
    """
    if margin < 1:
        raise ValueError("margin must be >= 1")
    b = bias_factor * c if c > 0 else 1.0
    delta = (b - c) * T / ((2 * K + 2) * margin * kappa)
    return TemParams(b, kappa, delta)
