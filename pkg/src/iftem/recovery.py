"""
Fourier-series coefficients from firing times.

Two linear forward models relate the firing instants to the unknowns
u[k] = xhat[k] / (j k w0):

* difference model    y_n = sum_k u[k] (e^{j k w0 t_{n+1}} - e^{j k w0 t_n})
* partial-sum model   z_n = sum_{i<n} y_i = c0 + sum_k u[k] e^{j k w0 t_n}

The partial-sum model has a Vandermonde matrix whose entries carry half the
jitter variance of the difference matrix, which is what makes it robust.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoder import FiringTrace, measurements
from .errors import RankDeficient, TooFewFirings
from . import spectral

__all__ = ["DIFF_B", "PARTIAL_A", "ForwardMatrix", "FscEstimate", "RecoveryResult",
           "build_forward", "partial_sums", "analysis_window", "solve_fsc_baseline",
           "solve_fsc_robust", "variance_ratio_check", "decode", "estimate_delays", "algorithm1"]

DIFF_B = "diff_b"
PARTIAL_A = "partial_a"

# relative singular-value cutoff for the pseudo-inverse
RCOND = 1e-10


@dataclass(frozen=True)
class ForwardMatrix:
    entries: np.ndarray
    kind: str
    times: np.ndarray
    K: int
    omega0: float

    @property
    def ks(self):
        if self.kind == DIFF_B:
            return np.concatenate([np.arange(-self.K, 0), np.arange(1, self.K + 1)])
        return np.arange(-self.K, self.K + 1)


@dataclass
class FscEstimate:
    """
    Estimated coefficients xhat[k], k = +-1..+-K, stored as ``xhat[K + k]`` in
    a length 2K+1 array whose centre entry is unused (zero).
    """

    xhat: np.ndarray
    K: int
    omega0: float
    c0: complex | None = None
    cond: float = np.nan
    residual: float = np.nan
    consistency: float | None = None

    def __getitem__(self, k):
        if k == 0 or abs(k) > self.K:
            raise KeyError(k)
        return self.xhat[self.K + k]

    @property
    def positive(self):
        return self.xhat[self.K + 1:]

    @property
    def negative(self):
        """xhat[-K..-1] in increasing k."""
        return self.xhat[:self.K]

    def as_map(self):
        return {k: complex(self[k]) for k in range(-self.K, self.K + 1) if k}


@dataclass
class RecoveryResult:
    amplitudes: np.ndarray
    delays: np.ndarray
    fsc: FscEstimate
    method: str
    n_firings: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "method": self.method,
            "amplitudes": [float(a) for a in self.amplitudes],
            "delays_s": [float(t) for t in self.delays],
            "n_firings": self.n_firings,
            "fsc": {str(k): [v.real, v.imag] for k, v in self.fsc.as_map().items()},
            "cond": self.fsc.cond,
            "residual": self.fsc.residual,
            **self.diagnostics,
        }


def build_forward(times, K, omega0, kind, strict=True):
    """
    Difference matrix B, (N-1) x 2K, or partial-sum matrix A, (N-1) x (2K+1).

    With ``strict=False`` underdetermined (too few rows) matrices are built
    too; otherwise they raise TooFewFirings.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise TooFewFirings("need at least two firing times")
    need = 2 * K if kind == DIFF_B else 2 * K + 1
    if strict and t.size - 1 < need:
        raise TooFewFirings(f"{t.size} firings, need at least {need + 1}")
    if kind == PARTIAL_A:
        ks = np.arange(-K, K + 1)
        E = np.exp(1j * omega0 * np.multiply.outer(t[1:], ks))
    elif kind == DIFF_B:
        ks = np.concatenate([np.arange(-K, 0), np.arange(1, K + 1)])
        P = np.exp(1j * omega0 * np.multiply.outer(t, ks))
        E = P[1:] - P[:-1]
    else:
        raise ValueError(f"unknown forward model {kind!r}")
    return ForwardMatrix(E, kind, t, K, omega0)


def partial_sums(y):
    """z_n = y_1 + ... + y_{n-1} for n = 2..N (same length as `y`)."""
    y = np.asarray(y)
    if y.size == 0:
        raise ValueError("empty measurement list")
    return np.cumsum(y)


def analysis_window(times, period):
    """
    Firings in [t_1, t_1 + T), with exact duplicates nudged apart by 1e-12 T.
    """
    t = np.sort(np.asarray(times, dtype=float))
    if t.size == 0:
        return t
    t = t[t < t[0] + period]
    for i in range(1, t.size):
        if t[i] <= t[i - 1]:
            t[i] = t[i - 1] + 1e-12 * period
    return t


def _pinv_solve(M, rhs):
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        raise RankDeficient("zero matrix")
    rank = int(np.sum(s > RCOND * s[0]))
    if rank < M.shape[1]:
        raise RankDeficient(f"numerical rank {rank} < {M.shape[1]}")
    sol = Vh.conj().T @ ((U.conj().T @ rhs) / s)
    return sol, float(s[0] / s[-1]), float(np.linalg.norm(M @ sol - rhs))


def _symmetrise(xhat, K):
    mirrored = np.conj(xhat[::-1])
    out = (xhat + mirrored) / 2
    out[K] = 0
    return out


def _windowed(trace, period):
    t = analysis_window(trace.times, period)
    return FiringTrace(t, trace.params, trace.provenance, trace.sigma, trace.bound_c)


def solve_fsc_baseline(trace, K, period):
    """xhat from the difference model via the pseudo-inverse of B."""
    tr, w0 = _windowed(trace, period), 2 * np.pi / period
    B = build_forward(tr.times, K, w0, DIFF_B)
    y = measurements(tr)
    u, cond, res = _pinv_solve(B.entries, y)
    ks = B.ks
    xhat = np.zeros(2 * K + 1, dtype=complex)
    xhat[K + ks] = 1j * ks * w0 * u
    return FscEstimate(_symmetrise(xhat, K), K, w0, None, cond, res)


def solve_fsc_robust(trace, K, period):
    """xhat from the partial-sum model via the pseudo-inverse of A."""
    tr, w0 = _windowed(trace, period), 2 * np.pi / period
    A = build_forward(tr.times, K, w0, PARTIAL_A)
    z = partial_sums(measurements(tr))
    zhat, cond, res = _pinv_solve(A.entries, z)
    ks = A.ks
    xhat = 1j * ks * w0 * zhat
    c0 = complex(zhat[K])
    nz = ks != 0
    # the constant must cancel the k != 0 terms at t_1
    consistency = abs(c0 + np.sum(zhat[nz] * np.exp(1j * ks[nz] * w0 * tr.times[0])))
    return FscEstimate(_symmetrise(xhat, K), K, w0, c0, cond, res, float(consistency))


def variance_ratio_check(times, K, sigma, trials, seed, omega0=2 * np.pi,
                         entries=((0, 1),)):
    """
    Monte-Carlo ratio var([B]_nk) / var([A]_nk) under uniform jitter.

    `entries` lists (row n, harmonic k) pairs, with rows counted from 0 so
    that row n uses t_{n+1} and t_{n+2} in one-based firing numbering.
    Returns an array of ratios, NaN where both variances vanish.
    """
    t = np.asarray(times, dtype=float)
    if sigma == 0:
        return np.full(len(entries), np.nan)
    rng = np.random.default_rng(seed)
    eps = rng.uniform(-sigma / 2, sigma / 2, size=(trials, t.size))
    tj = t + eps
    out = []
    for n, k in entries:
        a = np.exp(1j * k * omega0 * tj[:, n + 1])
        b = a - np.exp(1j * k * omega0 * tj[:, n])
        va = np.mean(np.abs(a - a.mean()) ** 2)
        vb = np.mean(np.abs(b - b.mean()) ** 2)
        out.append(vb / va if va > 0 else np.nan)
    return np.array(out)


def decode(trace, K, L, pulse, period, method="robust", grid=None, denoise=None,
           cadzow_iters=20):
    """
    Amplitudes and delays of a periodic FRI signal from its firing trace.

    Parameters
    ----------
    trace : FiringTrace
    K : int
        Highest harmonic passed by the sampling kernel.
    L : int
        Number of pulses.
    pulse : PulseShape
    period : float
    method : {'robust', 'baseline'}
        Partial-sum model (A) or difference model (B).
    grid : array_like, optional
        Candidate delays when they are known to lie on a grid; enables the
        K >= L regime.  Without it K >= 2L is required.
    denoise : bool, optional
        Cadzow-denoise each band before annihilation; defaults to on when
        K >= 2L + 1.
    """
    if grid is not None:
        est = _solve(trace, K, period, method)
        n = analysis_window(trace.times, period).size
        amps, delays = spectral.grid_search(est.as_map(), L, pulse, period, grid)
        return RecoveryResult(amps, delays, est, method, n)

    delays, est, diag = estimate_delays(trace, K, L, pulse, period, method, denoise,
                                        cadzow_iters)
    n = analysis_window(trace.times, period).size
    amps = spectral.estimate_amplitudes(est.as_map(), delays, pulse, period)
    return RecoveryResult(amps, delays, est, method, n, diag)


def _solve(trace, K, period, method):
    if method == "robust":
        return solve_fsc_robust(trace, K, period)
    if method == "baseline":
        return solve_fsc_baseline(trace, K, period)
    raise ValueError(f"unknown method {method!r}")


def estimate_delays(trace, K, L, pulse, period, method="robust", denoise=None,
                    cadzow_iters=20):
    """
    Off-grid delays only, skipping the amplitude fit.

    Returns ``(delays, fsc_estimate, diagnostics)`` with delays sorted.
    Useful when only delays are scored, since coincident delay estimates
    make the amplitude fit singular but are still valid estimates.
    """
    est = _solve(trace, K, period, method)
    if K < 2 * L:
        raise ValueError("off-grid recovery needs K >= 2L (pass grid= for on-grid delays)")
    if denoise is None:
        denoise = K >= 2 * L + 1
    ks = np.arange(1, K + 1)
    scale = period / pulse.ft(ks * 2 * np.pi / period)
    pos = est.positive * scale
    neg = est.negative * scale[::-1]
    diag = {}
    if denoise:
        pos, info_p = spectral.cadzow(pos, L, cadzow_iters)
        neg, info_n = spectral.cadzow(neg, L, cadzow_iters)
        diag["cadzow_converged"] = bool(info_p.converged and info_n.converged)
    poly = spectral.annihilating_filter([pos, neg], L)
    return spectral.roots_to_delays(poly, period), est, diag


def algorithm1(trace, K, L, pulse, period, grid=None, **kwargs):
    """Robust (partial-sum) reconstruction of a T-periodic FRI signal."""
    return decode(trace, K, L, pulse, period, "robust", grid=grid, **kwargs)
