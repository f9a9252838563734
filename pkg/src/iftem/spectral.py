"""
Delay and amplitude estimation from sums of complex exponentials.

After dividing out the pulse transform, each coefficient band satisfies

    s[k] = T xhat[k] / hhat(k w0) = sum_l a_l u_l^k,   u_l = exp(-j w0 tau_l)

on consecutive k, so a degree-L annihilating filter whose roots are the u_l
exists.  Both bands (k < 0 and k > 0) share that filter, which is why they
can be annihilated jointly by stacking their convolution matrices.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from .errors import (IllConditionedVandermonde, IllPosed, LengthMismatch,
                     RootFindingFailure)

__all__ = ["convolution_matrix", "annihilating_filter", "cadzow", "CadzowInfo",
           "roots_to_delays", "estimate_amplitudes", "grid_search", "mse_delays",
           "lift", "MSE_FLOOR_DB"]

MSE_FLOOR_DB = -300.0


def convolution_matrix(values, L):
    """Rows [s[k], s[k-1], ..., s[k-L]] for every length-(L+1) window."""
    v = np.asarray(values, dtype=complex)
    if v.size < L + 1:
        raise ValueError(f"band of length {v.size} too short for L={L}")
    return toeplitz(v[L:], v[L::-1])


def annihilating_filter(bands, L):
    """
    Coefficients (1, c_1, ..., c_L) of the filter annihilating every band.

    `bands` is one array or a list of arrays, each holding consecutive
    coefficients in increasing k.  The filter is the right singular vector of
    the stacked convolution matrices for the smallest singular value.
    """
    if isinstance(bands, np.ndarray) and bands.ndim == 1:
        bands = [bands]
    M = np.vstack([convolution_matrix(b, L) for b in bands])
    if M.shape[0] < L:
        raise ValueError("not enough windows to determine the filter")
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    s = np.concatenate([s, np.zeros(L + 1 - s.size)])
    if s[0] == 0 or s[-2] - s[-1] <= 1e-8 * s[0]:
        raise IllPosed("annihilating filter null space is not one-dimensional")
    h = Vh[-1].conj()
    if abs(h[0]) < 1e-14 * np.linalg.norm(h):
        raise IllPosed("leading filter coefficient vanishes")
    return h / h[0]


def lift(values, rows=None):
    """Near-square Toeplitz lift with T[i, j] = s[cols - 1 + i - j]."""
    v = np.asarray(values, dtype=complex)
    if rows is None:
        rows = v.size // 2 + 1
    cols = v.size - rows + 1
    return toeplitz(v[cols - 1:], v[cols - 1::-1])


def _unlift(M):
    rows, cols = M.shape
    idx = cols - 1 + np.subtract.outer(np.arange(rows), np.arange(cols))
    n = rows + cols - 1
    sums = np.zeros(n, dtype=complex)
    np.add.at(sums, idx, M)
    counts = np.bincount(idx.ravel(), minlength=n)
    return sums / counts


@dataclass
class CadzowInfo:
    converged: bool
    iterations: int
    ratios: list = field(default_factory=list)


def cadzow(values, L, max_iters=20, tol=1e-12):
    """
    Cadzow denoising: alternate rank-L truncation and Toeplitz averaging.

    Returns the denoised band and a `CadzowInfo` whose `ratios` track
    sigma_{L+1}/sigma_1 of the lifted matrix before each truncation.
    """
    v = np.asarray(values, dtype=complex)
    if v.size < 2 * L + 1:
        raise ValueError(f"Cadzow needs at least 2L+1 = {2 * L + 1} values, got {v.size}")
    info = CadzowInfo(False, 0)
    for it in range(max_iters + 1):
        U, s, Vh = np.linalg.svd(lift(v), full_matrices=False)
        ratio = s[L] / s[0] if s[0] > 0 else 0.0
        info.ratios.append(float(ratio))
        if ratio < tol:
            info.converged = True
            break
        if it == max_iters:
            break
        v = _unlift((U[:, :L] * s[:L]) @ Vh[:L])
        info.iterations = it + 1
    return v, info


def roots_to_delays(poly, period):
    """Delays in (0, T] from the filter roots, projected onto the unit circle."""
    try:
        u = np.roots(poly)
    except np.linalg.LinAlgError as exc:
        raise RootFindingFailure(str(exc)) from exc
    if u.size != len(poly) - 1 or not np.all(np.isfinite(u)):
        raise RootFindingFailure("polynomial lost degree or produced non-finite roots")
    # angle() is unchanged by radial projection
    tau = np.mod(-period / (2 * np.pi) * np.angle(u), period)
    tau[tau <= 0] = period
    return np.sort(tau)


def _normalised(xhat, pulse, period):
    ks = np.array(sorted(xhat))
    vals = np.array([xhat[k] for k in ks])
    return ks, vals * period / pulse.ft(ks * 2 * np.pi / period)


def estimate_amplitudes(xhat, delays, pulse, period):
    """
    Real amplitudes from least squares on all available coefficients.

    `xhat` maps harmonic k to its coefficient.
    """
    tau = np.asarray(delays, dtype=float)
    if tau.size > 1:
        d = np.diff(np.sort(np.concatenate([tau, [np.min(tau) + period]])))
        if d.min() < 1e-6 * period:
            raise IllConditionedVandermonde("delays closer than 1e-6 T")
    ks, s = _normalised(xhat, pulse, period)
    V = np.exp(-1j * 2 * np.pi / period * np.multiply.outer(ks, tau))
    a, *_ = np.linalg.lstsq(V, s, rcond=None)
    if np.max(np.abs(a.imag)) > 1e-6 * max(np.max(np.abs(a)), 1e-300):
        warnings.warn("amplitude estimate has a non-negligible imaginary part",
                      RuntimeWarning, stacklevel=2)
    return a.real


def grid_search(xhat, L, pulse, period, grid, max_subsets=2_000_000):
    """
    On-grid recovery: the L-subset of `grid` whose real least-squares fit
    leaves the smallest residual on the positive harmonics.

    Exhaustive, so exact whenever the noiseless support is unique.
    """
    grid = np.asarray(grid, dtype=float)
    n_sub = int(np.round(np.prod([(grid.size - i) / (i + 1) for i in range(L)])))
    if n_sub > max_subsets:
        raise ValueError(f"{n_sub} candidate supports exceeds max_subsets")
    ks, s = _normalised({k: v for k, v in xhat.items() if k > 0}, pulse, period)
    V = np.exp(-1j * 2 * np.pi / period * np.multiply.outer(ks, grid))
    Vr = np.concatenate([V.real, V.imag])
    sr = np.concatenate([s.real, s.imag])
    best, best_res, best_a = None, np.inf, None
    combos = np.array(list(itertools.combinations(range(grid.size), L)))
    for chunk in np.array_split(combos, max(1, combos.shape[0] // 20_000)):
        M = np.moveaxis(Vr[:, chunk], 1, 0)          # (S, 2K, L)
        a = np.linalg.pinv(M) @ sr                   # (S, L)
        r = np.linalg.norm(np.einsum("sij,sj->si", M, a) - sr, axis=1)
        i = int(np.argmin(r))
        if r[i] < best_res:
            best, best_res, best_a = chunk[i], r[i], a[i]
    tau = grid[best]
    order = np.argsort(tau)
    return best_a[order], tau[order]


def mse_delays(truth, estimate, period=1.0):
    """
    10 log10 of the summed squared circular delay errors, floored at -300 dB.

    Both lists are sorted and paired index-wise, taking the cyclic rotation
    of that pairing with the smallest error.
    """
    t = np.sort(np.asarray(truth, dtype=float))
    e = np.sort(np.asarray(estimate, dtype=float))
    if t.size != e.size:
        raise LengthMismatch(f"{t.size} true delays vs {e.size} estimates")
    best = np.inf
    for r in range(max(1, t.size)):
        d = np.abs(t - np.roll(e, r)) % period
        d = np.minimum(d, period - d)
        best = min(best, float(np.sum(d ** 2)))
    if best <= 0:
        return MSE_FLOOR_DB
    return float(max(MSE_FLOOR_DB, 10 * np.log10(best)))
