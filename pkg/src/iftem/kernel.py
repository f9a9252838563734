"""
Sum-of-sincs (SoS) sampling kernel with the zeroth harmonic removed.

The kernel passes the harmonics k in {-K..-1, 1..K} with unit gain, so the
filtered signal is a finite Fourier sum

    y(t) = sum_{k in Kset} xhat[k] exp(j k w0 t)

whose antiderivative is available in closed form because k = 0 is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize

from .errors import KernelSignalMismatch
from .model import fsc_vector

__all__ = ["SosKernel", "FilteredSignal", "AmplitudeBound", "filter_signal",
           "eval_y", "antiderivative_Y", "amplitude_bound", "max_abs"]


@dataclass(frozen=True)
class SosKernel:
    K: int
    omega0: float

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("K must be a positive integer")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")

    @classmethod
    def for_period(cls, K, period):
        return cls(int(K), 2 * np.pi / period)

    @property
    def period(self):
        return 2 * np.pi / self.omega0

    @property
    def freq_set(self):
        """Integer harmonics -K..-1, 1..K."""
        return np.concatenate([np.arange(-self.K, 0), np.arange(1, self.K + 1)])

    def response(self, omega):
        """ghat(omega) = sum over the harmonic set of sinc(omega/w0 - k)."""
        omega = np.asarray(omega, dtype=float)
        return np.sinc(np.subtract.outer(omega / self.omega0, self.freq_set)).sum(axis=-1)

    def impulse(self, t):
        """Time-domain kernel: (2/T) sum_k cos(k w0 t) on |t| < T/2, else 0."""
        t = np.asarray(t, dtype=float)
        ks = np.arange(1, self.K + 1)
        g = 2 / self.period * np.cos(self.omega0 * np.multiply.outer(t, ks)).sum(axis=-1)
        return np.where(np.abs(t) < self.period / 2, g, 0.0)

    @property
    def sup_norm(self):
        """max |g(t)|, attained at t = 0."""
        return 2 * self.K / self.period


@dataclass(frozen=True)
class FilteredSignal:
    """
    y(t) specified by its positive-harmonic coefficients xhat[1..K].

    Negative harmonics follow from conjugate symmetry, so y is real.
    """

    coeffs: np.ndarray
    omega0: float
    bound_c: float

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self):
        return self.coeffs.size

    @property
    def period(self):
        return 2 * np.pi / self.omega0

    def coeff(self, k):
        if k == 0 or abs(k) > self.K:
            return 0j
        c = self.coeffs[abs(k) - 1]
        return c if k > 0 else np.conj(c)

    def as_map(self):
        return {k: complex(self.coeff(k)) for k in
                list(range(-self.K, 0)) + list(range(1, self.K + 1))}

    def __call__(self, t):
        return eval_y(self, t)


def filter_signal(signal, kernel):
    """Pass `signal` through `kernel`; the amplitude bound is the refined max |y|."""
    if abs(kernel.omega0 - signal.omega0) > 1e-12 * signal.omega0:
        raise KernelSignalMismatch(
            f"kernel w0={kernel.omega0!r} but signal w0={signal.omega0!r}")
    coeffs = fsc_vector(signal, np.arange(1, kernel.K + 1))
    f = FilteredSignal(coeffs, signal.omega0, 0.0)
    return FilteredSignal(coeffs, signal.omega0, max_abs(f))


def _trig_sum(coeffs, omega0, t):
    # sum_{k>=1} coeffs[k-1] z^k with z = exp(j w0 t), by Horner in z
    z = np.exp(1j * omega0 * np.asarray(t, dtype=float))
    return P.polyval(z, np.concatenate([[0], coeffs]))


def eval_y(f, t):
    """y(t) = 2 Re sum_{k>=1} xhat[k] exp(j k w0 t)."""
    return 2 * np.real(_trig_sum(f.coeffs, f.omega0, t))


def antiderivative_Y(f, t):
    """Antiderivative of y normalised so that Y(0) = 0."""
    scaled = f.coeffs / (1j * np.arange(1, f.K + 1) * f.omega0)
    return 2 * np.real(_trig_sum(scaled, f.omega0, t) - np.sum(scaled))


def max_abs(f, grid_points=10_000, refine=8):
    """max_t |y(t)| from a dense grid followed by bounded local refinement."""
    if not np.any(f.coeffs):
        return 0.0
    T = f.period
    t = np.arange(grid_points) * (T / grid_points)
    v = np.abs(eval_y(f, t))
    best = float(v.max())
    h = T / grid_points
    for i in np.argsort(v)[::-1][:refine]:
        res = optimize.minimize_scalar(
            lambda s: -abs(float(eval_y(f, s))), bounds=(t[i] - h, t[i] + h),
            method="bounded", options={"xatol": 1e-14 * T})
        best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class AmplitudeBound:
    analytic: float
    empirical: float


def amplitude_bound(signal, kernel):
    """
    Analytic bound L * a_max * ||g||_inf * ||h||_1 and the refined max |y|.

    The encoder works with the empirical value; the analytic one is always
    at least as large.
    """
    a_max = float(np.max(np.abs(signal.amplitudes)))
    analytic = signal.L * a_max * kernel.sup_norm * signal.shape.l1_norm
    return AmplitudeBound(analytic, filter_signal(signal, kernel).bound_c)
