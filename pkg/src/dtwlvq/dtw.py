"""Dynamic time warping: distance, optimal warping paths, warping/valence
matrices and the subgradient of the squared DTW distortion.

Time series are handled as float64 arrays of shape ``(m, d)``; 1-d input is
promoted to a single feature column. Warping paths are integer arrays of
shape ``(L, 2)`` holding 0-based index pairs ``(i, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .errors import InputError, PathError, SizeError

MAX_ENUMERATION_ORDER = 14


def as_series(x) -> np.ndarray:
    """Validate ``x`` and return it as a float64 array of shape (m, d)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InputError(f"time series must be 1-d or 2-d, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError("time series must have length >= 1 and dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise InputError("time series contains NaN or Inf")
    return np.ascontiguousarray(arr)


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x, y = as_series(x), as_series(y)
    if x.shape[1] != y.shape[1]:
        raise InputError(f"feature dimensions differ: {x.shape[1]} vs {y.shape[1]}")
    return x, y


def check_path(path, m: int, n: int) -> np.ndarray:
    """Return ``path`` as an (L, 2) int array after checking it is a warping
    path of order m x n."""
    w = np.asarray(path, dtype=np.int64)
    if w.ndim != 2 or w.shape[1] != 2 or w.shape[0] == 0:
        raise PathError(f"path must be a nonempty sequence of index pairs, got shape {w.shape}")
    if tuple(w[0]) != (0, 0) or tuple(w[-1]) != (m - 1, n - 1):
        raise PathError(
            f"boundary condition violated: path runs {tuple(w[0])} -> {tuple(w[-1])}, "
            f"expected (0, 0) -> ({m - 1}, {n - 1})"
        )
    steps = np.diff(w, axis=0)
    ok = ((steps == (1, 0)) | (steps == (0, 1)) | (steps == (1, 1))).all(axis=1)
    if not ok.all():
        bad = int(np.argmin(ok))
        raise PathError(f"step condition violated between points {bad} and {bad + 1}")
    return w


@numba.njit(cache=True)
def _accumulate(x, y):
    m, n, d = x.shape[0], y.shape[0], x.shape[1]
    acc = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            c = 0.0
            for k in range(d):
                diff = x[i, k] - y[j, k]
                c += diff * diff
            if i == 0 and j == 0:
                acc[i, j] = c
            elif i == 0:
                acc[i, j] = c + acc[i, j - 1]
            elif j == 0:
                acc[i, j] = c + acc[i - 1, j]
            else:
                best = acc[i - 1, j - 1]
                if acc[i - 1, j] < best:
                    best = acc[i - 1, j]
                if acc[i, j - 1] < best:
                    best = acc[i, j - 1]
                acc[i, j] = c + best
    return acc


@numba.njit(cache=True)
def _squared_dtw(x, y):
    # two-row variant of _accumulate for when no path is needed
    m, n, d = x.shape[0], y.shape[0], x.shape[1]
    prev = np.empty(n)
    cur = np.empty(n)
    for i in range(m):
        for j in range(n):
            c = 0.0
            for k in range(d):
                diff = x[i, k] - y[j, k]
                c += diff * diff
            if i == 0 and j == 0:
                cur[j] = c
            elif i == 0:
                cur[j] = c + cur[j - 1]
            elif j == 0:
                cur[j] = c + prev[j]
            else:
                best = prev[j - 1]
                if prev[j] < best:
                    best = prev[j]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                cur[j] = c + best
        prev, cur = cur, prev
    return prev[n - 1]


@numba.njit(cache=True)
def _backtrace(acc):
    # ties: diagonal, then vertical (i-1, j), then horizontal (i, j-1)
    m, n = acc.shape
    out = np.empty((m + n - 1, 2), dtype=np.int64)
    i, j = m - 1, n - 1
    k = 0
    out[k, 0], out[k, 1] = i, j
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag, up, left = acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
            if diag <= up and diag <= left:
                i -= 1
                j -= 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
        k += 1
        out[k, 0], out[k, 1] = i, j
    return out[: k + 1][::-1].copy()


class DtwResult(NamedTuple):
    distance: float
    path: np.ndarray


def dtw(x, y) -> DtwResult:
    """DTW distance between ``x`` and ``y`` together with an optimal path.

    The returned path is the one found by a deterministic backtrace, so the
    same inputs always yield the same path even when several are optimal.
    """
    x, y = _pair(x, y)
    acc = _accumulate(x, y)
    return DtwResult(float(np.sqrt(acc[-1, -1])), _backtrace(acc))


def squared_dtw(x, y) -> float:
    """dtw(x, y) ** 2 without building a path (the classification hot path)."""
    x, y = _pair(x, y)
    return float(_squared_dtw(x, y))


def optimal_path(x, y) -> tuple[float, np.ndarray]:
    """Squared DTW distortion and the deterministic optimal path."""
    x, y = _pair(x, y)
    acc = _accumulate(x, y)
    return float(acc[-1, -1]), _backtrace(acc)


def alignment_cost(x, y, path) -> float:
    """Sum of squared feature differences along ``path``."""
    x, y = _pair(x, y)
    w = check_path(path, len(x), len(y))
    diff = x[w[:, 0]] - y[w[:, 1]]
    cost = 0.0
    for c in (diff * diff).sum(axis=1):
        cost += c
    return cost


def enumerate_warping_paths(m: int, n: int) -> list[tuple[tuple[int, int], ...]]:
    """Every warping path of order m x n, each exactly once.

    Exponential in m + n; intended as a test oracle and guarded accordingly.
    """
    if m < 1 or n < 1:
        raise SizeError("path order must be positive")
    if m + n > MAX_ENUMERATION_ORDER:
        raise SizeError(f"m + n = {m + n} exceeds enumeration guard {MAX_ENUMERATION_ORDER}")
    paths = []

    def extend(prefix):
        i, j = prefix[-1]
        if (i, j) == (m - 1, n - 1):
            paths.append(tuple(prefix))
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            if i + di < m and j + dj < n:
                prefix.append((i + di, j + dj))
                extend(prefix)
                prefix.pop()

    extend([(0, 0)])
    return paths


@dataclass(frozen=True)
class Alignment:
    """A warping path of order m x n with its valence vector.

    The warping matrix is kept implicit: ``warp`` streams over the path
    instead of multiplying with a dense 0/1 matrix.
    """

    path: np.ndarray
    valence: np.ndarray
    shape: tuple[int, int]

    @property
    def warping_matrix(self) -> np.ndarray:
        W = np.zeros(self.shape, dtype=np.int64)
        W[self.path[:, 0], self.path[:, 1]] = 1
        return W

    @property
    def valence_matrix(self) -> np.ndarray:
        return np.diag(self.valence)

    def warp(self, x: np.ndarray) -> np.ndarray:
        """W @ x, accumulated in path order."""
        x = as_series(x)
        if len(x) != self.shape[1]:
            raise InputError(f"series length {len(x)} does not match path order {self.shape}")
        return _warp(self.path, x, self.shape[0])


@numba.njit(cache=True)
def _warp(path, x, m):
    out = np.zeros((m, x.shape[1]))
    for l in range(path.shape[0]):
        i, j = path[l, 0], path[l, 1]
        for k in range(x.shape[1]):
            out[i, k] += x[j, k]
    return out


def alignment_of(path, m: int | None = None, n: int | None = None) -> Alignment:
    """Warping matrix and valences of ``path``.

    The order defaults to the path's end point.
    """
    w = np.asarray(path, dtype=np.int64)
    if w.ndim != 2 or w.shape[0] == 0:
        raise PathError("path must be a nonempty sequence of index pairs")
    if m is None or n is None:
        m, n = int(w[-1, 0]) + 1, int(w[-1, 1]) + 1
    w = check_path(w, m, n)
    valence = np.bincount(w[:, 0], minlength=m)
    return Alignment(w, valence, (m, n))


def subgradient(p, x) -> np.ndarray:
    """2 (V p - W x): a subgradient of q -> dtw(q, x)**2 at q = p.

    V and W belong to the deterministic optimal path between p and x, so the
    result has the length of ``p``.
    """
    p, x = _pair(p, x)
    _, path = optimal_path(p, x)
    al = alignment_of(path, len(p), len(x))
    return 2.0 * (al.valence[:, None] * p - al.warp(x))
