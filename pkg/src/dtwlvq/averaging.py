"""Weighted averages of warped time series and DBA barycenters."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .dtw import _pair, alignment_of, as_series, optimal_path, squared_dtw
from .errors import InputError

DBA_MAX_ITER = 50
DBA_TOL = 1e-8


def asymmetric_weighted_average(p, x, alpha: float, path) -> np.ndarray:
    """Weighted average on the time axis of ``p``.

    Every p_i with valence v and aligned elements x_j1..x_jv becomes
    ``(1 - alpha) * v * p_i + alpha * (x_j1 + ... + x_jv)``.
    """
    p, x = _pair(p, x)
    if not np.isfinite(alpha):
        raise InputError("alpha must be finite")
    al = alignment_of(path, len(p), len(x))
    return (1.0 - alpha) * al.valence[:, None] * p + alpha * al.warp(x)


def symmetric_weighted_average(p, x, alpha: float, path) -> np.ndarray:
    """Per-path-point convex combination; the result has the path's length."""
    p, x = _pair(p, x)
    if not np.isfinite(alpha):
        raise InputError("alpha must be finite")
    w = alignment_of(path, len(p), len(x)).path
    return (1.0 - alpha) * p[w[:, 0]] + alpha * x[w[:, 1]]


def resample(z, m: int) -> np.ndarray:
    """Piecewise-linear projection of ``z`` onto length ``m``."""
    z = as_series(z)
    if m < 1:
        raise InputError("target length must be >= 1")
    if len(z) == m:
        return z.copy()
    src = np.arange(len(z), dtype=np.float64)
    at = np.linspace(0.0, len(z) - 1.0, m)
    return np.stack([np.interp(at, src, z[:, k]) for k in range(z.shape[1])], axis=1)


def frechet_variation(z, S: Sequence) -> float:
    """Sum of squared DTW distances from ``z`` to every member of ``S``."""
    if len(S) == 0:
        raise InputError("frechet_variation needs a nonempty sample")
    return float(sum(squared_dtw(z, x) for x in S))


def medoid(S: Sequence) -> int:
    """Index of the member of ``S`` with the smallest Frechet variation."""
    if len(S) == 0:
        raise InputError("medoid of an empty sample")
    n = len(S)
    d2 = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            d2[a, b] = d2[b, a] = squared_dtw(S[a], S[b])
    return int(np.argmin(d2.sum(axis=1)))


def dba_mean(S: Sequence, init=None, max_iter: int = DBA_MAX_ITER, tol: float = DBA_TOL,
             trace: list | None = None) -> np.ndarray:
    """DTW barycenter averaging.

    Starting from ``init`` (the medoid of ``S`` when omitted), alternately
    aligns every member to the current mean and replaces each mean element
    by the average of the elements aligned to it. Stops once no element
    moves by more than ``tol`` or after ``max_iter`` updates.

    If ``trace`` is a list, the Frechet variation of the initial mean and of
    every subsequent mean is appended to it.
    """
    S = [as_series(x) for x in S]
    if not S:
        raise InputError("dba_mean needs a nonempty sample")
    if max_iter < 1:
        raise InputError("max_iter must be >= 1")
    z = S[medoid(S)].copy() if init is None else as_series(init).copy()
    m = len(z)
    for _ in range(max_iter):
        total = np.zeros_like(z)
        count = np.zeros(m, dtype=np.int64)
        variation = 0.0
        for x in S:
            cost, path = optimal_path(z, x)
            al = alignment_of(path, m, len(x))
            total += al.warp(x)
            count += al.valence
            variation += cost
        if trace is not None:
            trace.append(variation)
        assert count.min() >= 1, "every mean element receives an aligned element"
        new = total / count[:, None]
        shift = np.max(np.abs(new - z))
        z = new
        if shift < tol:
            break
    if trace is not None:
        trace.append(frechet_variation(z, S))
    return z
