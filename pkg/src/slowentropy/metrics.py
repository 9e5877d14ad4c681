"""Finite-time separation metrics along orbits.

Scalar functions take one pair of points; ``pair_statistics`` evaluates the
same quantities for every pair of a point cloud in one streaming pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import _kernels
from .systems import KindMismatchError, System

# Tolerance used by separation decisions: distances that are mathematically
# equal to the threshold can land one rounding step below it.
SEPARATION_ATOL = 1e-9
DEFAULT_CHECKPOINTS = 12


def _pair(system: System, p, q):
    if system.kind == "symbolic":
        p, q = system.validate(p), system.validate(q)
        if p.ndim or q.ndim:
            raise KindMismatchError("expected a single shift offset per point")
        return int(p), int(q)
    p, q = system.validate(p), system.validate(q)
    if p.shape != (system.dim,) or q.shape != (system.dim,):
        raise KindMismatchError("expected single points")
    return p, q


def _symbolic_profile(system, mismatch: np.ndarray) -> np.ndarray:
    """Base distances from a mismatch row covering times ``-K .. n-1+K``."""
    windows = sliding_window_view(mismatch.astype(float), 2 * system.radius + 1, axis=-1)
    return windows @ system.kernel


def distance_profile(system: System, p, q, n: int) -> np.ndarray:
    """Base distances ``d(f^i p, f^i q)`` for ``i = 0 .. n-1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p, q = _pair(system, p, q)
    if system.kind == "symbolic":
        K = system.radius
        w = system.words(np.array([p, q]), -K, n - 1 + K)
        return _symbolic_profile(system, w[0] != w[1])
    traj = system.orbit(np.stack([p, q]), n - 1)
    return np.asarray(system.base_distance(traj[:, 0], traj[:, 1]), dtype=float)


def bowen_distance(system: System, p, q, n: int) -> float:
    """Maximum base distance over the first ``n`` iterates."""
    return float(np.max(distance_profile(system, p, q, n)))


def hamming_distance(system: System, p, q, n: int) -> float:
    """Mean base distance over the first ``n`` iterates (correctly rounded sum)."""
    prof = distance_profile(system, p, q, n)
    # the division can round one ulp above the max; the true mean never does
    return min(math.fsum(prof) / n, float(np.max(prof)))


def mismatch_count(system: System, p, q, delta: float, n: int, atol: float = 0.0) -> int:
    """Number of times ``k < n`` with ``d(f^k p, f^k q) >= delta``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return int(np.count_nonzero(distance_profile(system, p, q, n) >= delta - atol))


def checkpoint_schedule(n: int, count: int = DEFAULT_CHECKPOINTS) -> np.ndarray:
    """Geometrically spaced integer times in ``[n/4, n]``, always ending at ``n``."""
    if n < 4:
        raise ValueError("horizon must be at least 4")
    if count < 2:
        raise ValueError("need at least two checkpoints")
    m = np.rint(np.geomspace(n / 4.0, n, count)).astype(np.int64)
    m = np.unique(np.clip(m, 1, n))
    m[-1] = n
    return m


@dataclass
class FrequencyEstimate:
    """Tail maximum of ``M_{delta,m}/m`` over the checkpoint times."""

    value: float
    checkpoints: list = field(default_factory=list)
    horizon: int = 0


def separation_frequency_estimate(
    system: System, p, q, delta: float, n: int,
    checkpoint_count: int = DEFAULT_CHECKPOINTS, atol: float = 0.0,
) -> FrequencyEstimate:
    """Finite proxy for the upper density of times the pair is delta apart."""
    marks = checkpoint_schedule(n, checkpoint_count)
    hits = np.cumsum(distance_profile(system, p, q, n) >= delta - atol)
    ratios = [(int(m), float(hits[m - 1]) / m) for m in marks]
    return FrequencyEstimate(max(r for _, r in ratios), ratios, int(n))


def word_distance(u, v) -> float:
    """Fraction of mismatching positions between two equal-length words."""
    if isinstance(u, str):
        u = np.frombuffer(u.encode(), dtype=np.uint8) - ord("0")
    if isinstance(v, str):
        v = np.frombuffer(v.encode(), dtype=np.uint8) - ord("0")
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape or u.ndim != 1 or u.size == 0:
        raise ValueError("words must be non-empty and of equal length")
    return float(np.count_nonzero(u != v)) / u.size


# --------------------------------------------------------------------------
# all pairs at once
# --------------------------------------------------------------------------


@dataclass
class PairStatistics:
    """Symmetric ``(N, N)`` matrices of orbit statistics for a point cloud.

    ``frequency`` holds the checkpoint-maximum of ``M_{delta,m}/m`` and is
    only present when a threshold was requested.
    """

    bowen: np.ndarray
    hamming: np.ndarray
    frequency: np.ndarray | None
    horizon: int
    delta: float | None = None


def _symmetrize(upper: np.ndarray) -> np.ndarray:
    return upper + upper.T


def _continuous_statistics(system, X, n, delta, marks, atol, chunk):
    N = X.shape[0]
    circle = np.array(system.circle_mask, dtype=np.bool_)
    thresh = np.inf if delta is None else delta - atol
    sums = np.zeros((N, N))
    maxs = np.zeros((N, N))
    counts = np.zeros((N, N), dtype=np.int64)
    freq = np.zeros((N, N)) if delta is not None else None

    bounds = set(range(0, n, chunk)) | {n}
    if marks is not None:
        bounds |= set(int(m) for m in marks)
    bounds = sorted(bounds)
    state = X
    for a, b in zip(bounds[:-1], bounds[1:]):
        traj = np.empty((N, b - a, system.dim))
        for t in range(b - a):
            traj[:, t] = state
            state = system.step(state)
        _kernels.pair_block(traj, circle, thresh, sums, maxs, counts)
        if freq is not None and b in marks:
            np.maximum(freq, counts / b, out=freq)
    return sums, maxs, freq


def _symbolic_statistics(system, X, n, delta, marks, atol):
    N = X.shape[0]
    K = system.radius
    words = system.words(X, -K, n - 1 + K)
    sums = np.zeros((N, N))
    maxs = np.zeros((N, N))
    freq = np.zeros((N, N)) if delta is not None else None
    for i in range(N - 1):
        prof = _symbolic_profile(system, words[i + 1:] != words[i])
        sums[i, i + 1:] = prof.sum(axis=1)
        maxs[i, i + 1:] = prof.max(axis=1)
        if freq is not None:
            hits = np.cumsum(prof >= delta - atol, axis=1)
            freq[i, i + 1:] = (hits[:, marks - 1] / marks).max(axis=1)
    return sums, maxs, freq


def pair_statistics(
    system: System, X, n: int, delta: float | None = None,
    checkpoint_count: int = DEFAULT_CHECKPOINTS, atol: float = 0.0, chunk: int = 512,
) -> PairStatistics:
    """Bowen, Hamming and (optionally) frequency matrices for all pairs of ``X``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    X = system.validate(X)
    if system.kind == "symbolic":
        X = X.reshape(-1)
    elif X.ndim != 2:
        raise KindMismatchError("expected an (N, dim) array of points")
    marks = checkpoint_schedule(n, checkpoint_count) if delta is not None else None
    if system.kind == "symbolic":
        sums, maxs, freq = _symbolic_statistics(system, X, n, delta, marks, atol)
    else:
        sums, maxs, freq = _continuous_statistics(system, X, n, delta, marks, atol, chunk)
    bowen = _symmetrize(maxs)
    return PairStatistics(
        bowen=bowen,
        hamming=np.minimum(_symmetrize(sums) / n, bowen),
        frequency=None if freq is None else _symmetrize(freq),
        horizon=int(n),
        delta=delta,
    )


def first_separation_times(system: System, X, delta: float, limit: int,
                           atol: float = 0.0, chunk: int = 512) -> np.ndarray:
    """Earliest ``k < limit`` with ``d(f^k p_i, f^k p_j) >= delta``, or -1."""
    X = system.validate(X)
    if system.kind == "symbolic":
        X = X.reshape(-1)
        N = X.size
        K = system.radius
        words = system.words(X, -K, limit - 1 + K)
        first = np.full((N, N), -1, dtype=np.int64)
        for i in range(N - 1):
            hit = _symbolic_profile(system, words[i + 1:] != words[i]) >= delta - atol
            first[i, i + 1:] = np.where(hit.any(axis=1), hit.argmax(axis=1), -1)
    else:
        N = X.shape[0]
        circle = np.array(system.circle_mask, dtype=np.bool_)
        first = np.full((N, N), -1, dtype=np.int64)
        for t0, block in system.iter_orbit(X, limit, chunk):
            _kernels.first_hits(np.ascontiguousarray(block.transpose(1, 0, 2)),
                                circle, delta - atol, t0, first)
            if np.all(first[np.triu_indices(N, 1)] >= 0):
                break
    upper = np.triu(first, 1)
    out = upper + upper.T
    np.fill_diagonal(out, 0)
    return out
