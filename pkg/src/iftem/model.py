"""
Periodic finite-rate-of-innovation (FRI) signals.

A T-periodic FRI signal is a stream of L delayed, scaled copies of a known
pulse h(t).  Its Fourier-series coefficients have the closed form

    xhat[k] = (1/T) * hhat(k w0) * sum_l a_l exp(-j k w0 tau_l),   w0 = 2 pi / T

which is exact for the three pulse shapes supported here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PulseShape", "FriSignal", "fsc", "fsc_vector", "eval_signal",
           "DIRAC", "CUBIC_BSPLINE", "RECT"]

DIRAC = "dirac"
CUBIC_BSPLINE = "cubic_bspline"
RECT = "rect"
_KINDS = (DIRAC, CUBIC_BSPLINE, RECT)


@dataclass(frozen=True)
class PulseShape:
    """
    Pulse prototype centred at t = 0.

    Parameters
    ----------
    kind : {'dirac', 'cubic_bspline', 'rect'}
    width : float
        Knot spacing of the cubic B-spline (support is ``4 * width``) or
        full width of the rectangle, in seconds.  Ignored for Diracs.
    """

    kind: str = DIRAC
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if self.kind != DIRAC and not self.width > 0:
            raise ValueError("pulse width must be positive")

    def ft(self, omega):
        """Continuous-time Fourier transform hhat(omega); real-valued."""
        omega = np.asarray(omega, dtype=float)
        if self.kind == DIRAC:
            return np.ones_like(omega)
        w = self.width
        # np.sinc(x) = sin(pi x)/(pi x), so sin(u)/u = np.sinc(u/pi)
        if self.kind == CUBIC_BSPLINE:
            return w * np.sinc(omega * w / (2 * np.pi)) ** 4
        return w * np.sinc(omega * w / (2 * np.pi))

    def __call__(self, t):
        """Time-domain pulse; Diracs have no pointwise value and raise."""
        t = np.asarray(t, dtype=float)
        if self.kind == DIRAC:
            raise ValueError("a Dirac pulse has no pointwise time-domain value")
        if self.kind == RECT:
            return (np.abs(t) <= self.width / 2).astype(float)
        x = np.abs(t) / self.width
        return np.where(
            x < 1, 2.0 / 3 - x ** 2 + x ** 3 / 2,
            np.where(x < 2, (2 - x) ** 3 / 6, 0.0))

    @property
    def l1_norm(self):
        """Integral of |h|."""
        return 1.0 if self.kind == DIRAC else float(self.width)

    @property
    def support(self):
        """Half-width of the support in seconds."""
        if self.kind == DIRAC:
            return 0.0
        if self.kind == RECT:
            return self.width / 2
        return 2 * self.width

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind != DIRAC:
            d["width_s"] = self.width
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        if kind == DIRAC:
            return cls(DIRAC)
        return cls(kind, float(d.get("width_s", 1.0)))


@dataclass(frozen=True)
class FriSignal:
    """
    T-periodic stream of L pulses.

    Amplitudes and delays are stored as read-only arrays; delays must lie in
    (0, T] and be pairwise distinct up to ``1e-9 * T``.
    """

    period: float
    amplitudes: np.ndarray
    delays: np.ndarray
    shape: PulseShape = field(default_factory=PulseShape)

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=float).ravel()
        tau = np.array(self.delays, dtype=float).ravel()
        if not self.period > 0:
            raise ValueError("period must be positive")
        if a.size < 1 or a.size != tau.size:
            raise ValueError("need L >= 1 matching amplitudes and delays")
        if np.any(tau <= 0) or np.any(tau > self.period):
            raise ValueError("delays must lie in (0, T]")
        s = np.sort(tau)
        if s.size > 1 and np.min(np.diff(s)) <= 1e-9 * self.period:
            raise ValueError("delays must be pairwise distinct")
        a.setflags(write=False)
        tau.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "delays", tau)

    @property
    def L(self):
        return self.amplitudes.size

    @property
    def omega0(self):
        return 2 * np.pi / self.period

    @property
    def rate_of_innovation(self):
        return 2 * self.L / self.period

    def to_dict(self):
        return {
            "period_s": self.period,
            "shape": self.shape.to_dict(),
            "pulses": [{"a": float(a), "tau_s": float(t)}
                       for a, t in zip(self.amplitudes, self.delays)],
        }

    @classmethod
    def from_dict(cls, d):
        pulses = d["pulses"]
        return cls(float(d["period_s"]),
                   [p["a"] for p in pulses], [p["tau_s"] for p in pulses],
                   PulseShape.from_dict(d.get("shape", {"kind": DIRAC})))


def fsc_vector(signal, ks):
    """Fourier-series coefficients of `signal` at the integer frequencies `ks`."""
    ks = np.asarray(ks)
    w = ks[..., None] * signal.omega0
    phasors = np.exp(-1j * w * signal.delays)
    return signal.shape.ft(ks * signal.omega0) / signal.period * (phasors @ signal.amplitudes)


def fsc(signal, k):
    """Fourier-series coefficient xhat[k] as a Python complex."""
    return complex(fsc_vector(signal, np.array([k]))[0])


def eval_signal(signal, t, k_max):
    """
    Truncated Fourier synthesis of x(t) using |k| <= k_max.

    For Diracs this is a Dirichlet-smoothed rendering meant for plots only.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    t = np.asarray(t, dtype=float)
    ks = np.arange(1, k_max + 1)
    c = fsc_vector(signal, ks)
    c0 = fsc(signal, 0).real
    ph = np.exp(1j * signal.omega0 * np.multiply.outer(t, ks))
    return c0 + 2 * np.real(ph @ c)
