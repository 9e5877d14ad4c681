"""Separation numbers: greedy lower bounds, exact maxima and witness sets.

Counts are restricted to a finite candidate set.  Greedy selection scans the
candidates in index order and keeps a point iff it is separated from every
point kept so far, so each count is a certified lower bound for the
supremum over the whole space.

Pairs whose distance is within ``SEPARATION_ATOL`` below the threshold are
treated as separated (see ``metrics.SEPARATION_ATOL``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import _kernels
from .metrics import (
    DEFAULT_CHECKPOINTS,
    SEPARATION_ATOL,
    checkpoint_schedule,
    first_separation_times,
    pair_statistics,
)
from .systems import AlphaProfile, KindMismatchError, SkewProduct, System

EXACT_LIMIT = 64
KINDS = ("bowen", "hamming", "asymptotic", "subword")


class SizeLimitError(ValueError):
    """The exact solver was asked to handle too many candidates."""


class HorizonExhaustedError(RuntimeError):
    """No time within the search horizon separates every witness pair."""


# --------------------------------------------------------------------------
# candidates
# --------------------------------------------------------------------------


@dataclass
class CandidateSet:
    """Finite proxy for the phase space.

    ``lattice`` is ``(steps, shape)`` when the points form a full cyclic
    grid on circle coordinates, ordered as ``np.indices(shape)`` flattened.
    """

    points: np.ndarray
    sampler: str
    seed: int | None = None
    lattice: tuple | None = None

    def __len__(self):
        return len(self.points)

    @property
    def count(self) -> int:
        return len(self.points)


def _axis(size: int, circle: bool) -> np.ndarray:
    # circle axes start at 0 so that the grid is a cyclic subgroup;
    # interval axes use cell centers
    j = np.arange(size, dtype=float)
    return j / size if circle else (j + 0.5) / size


def grid_candidates(system: System, shape) -> CandidateSet:
    """Uniform product grid; ``shape`` gives the number of values per coordinate."""
    if system.kind == "symbolic":
        raise KindMismatchError("use center_candidates for shift systems")
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    if len(shape) == 1 and system.dim > 1:
        side = round(shape[0] ** (1.0 / system.dim))
        if side ** system.dim != shape[0]:
            raise ValueError("count is not a perfect power; pass an explicit shape")
        shape = (side,) * system.dim
    if len(shape) != system.dim or min(shape) < 1:
        raise ValueError("grid shape does not match the phase space")
    axes = [_axis(s, c) for s, c in zip(shape, system.circle_mask)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, system.dim)
    return _with_lattice(CandidateSet(pts, "grid"), system, shape)


def _with_lattice(cs: CandidateSet, system: System, shape) -> CandidateSet:
    if all(system.circle_mask) and system.translation_invariant:
        shape = np.array(shape, dtype=np.int64)
        cs.lattice = (1.0 / shape, shape)
    return cs


def xgrid_candidates(system: System, count: int) -> CandidateSet:
    """``count`` distinct first coordinates on a uniform grid, other coordinates 0."""
    if system.kind == "symbolic":
        raise KindMismatchError("use center_candidates for shift systems")
    pts = np.zeros((count, system.dim))
    pts[:, 0] = _axis(count, system.circle_mask[0])
    cs = CandidateSet(pts, "xgrid")
    return _with_lattice(cs, system, (count,) + (1,) * (system.dim - 1))


def random_candidates(system: System, count: int, seed: int) -> CandidateSet:
    """Seeded uniform random points (interval coordinates in ``[0, 1]``)."""
    rng = np.random.default_rng(seed)
    pts = rng.random((count, system.dim))
    return CandidateSet(pts, "random", seed)


def center_candidates(progression: int, random_count: int = 0, seed: int = 0,
                      span: int = 1 << 30, step: int = 1) -> CandidateSet:
    """Shift offsets ``0, step, .., (progression-1)*step`` plus seeded random ones.

    Random centers are drawn from ``[0, span)``; duplicates are dropped so
    that the first occurrence keeps its index.
    """
    prog = np.arange(progression, dtype=np.int64) * step
    rng = np.random.default_rng(seed)
    extra = rng.integers(0, span, size=random_count, dtype=np.int64)
    pts = np.concatenate([prog, extra])
    _, first = np.unique(pts, return_index=True)
    pts = pts[np.sort(first)]
    return CandidateSet(pts, "centers", seed)


def witness_candidates(n_block: int) -> CandidateSet:
    """The ``2**n`` equally spaced points ``(x_j, 0)`` on the plateau ``I_n``."""
    if not 3 <= n_block <= 9:
        raise ValueError("n_block must lie in 3..9")
    j = np.arange(2 ** n_block, dtype=float)
    x = 2.0 ** -n_block + j * 2.0 ** -(2 * n_block + 2)
    return CandidateSet(np.stack([x, np.zeros_like(x)], axis=1), "witness")


def as_candidates(system: System, candidates) -> CandidateSet:
    if isinstance(candidates, CandidateSet):
        cs = candidates
    else:
        cs = CandidateSet(np.asarray(candidates), "explicit")
    pts = system.validate(cs.points)
    if system.kind == "symbolic":
        pts = pts.reshape(-1)
    elif pts.ndim != 2:
        raise KindMismatchError("candidates must be an (N, dim) array")
    return CandidateSet(pts, cs.sampler, cs.seed, cs.lattice)


# --------------------------------------------------------------------------
# results
# --------------------------------------------------------------------------

RESULT_COLUMNS = ("system", "kind", "method", "delta", "nu", "n", "count",
                  "seed", "sampler", "candidate_count")


@dataclass
class SeparationResult:
    kind: str
    delta: float
    count: int
    method: str
    n: int | None = None
    nu: float | None = None
    sampler: str = ""
    seed: int | None = None
    candidate_count: int = 0
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64), repr=False)

    def to_row(self, system: str) -> dict:
        return {
            "system": system,
            "kind": self.kind,
            "method": self.method,
            "delta": repr(float(self.delta)),
            "nu": "" if self.nu is None else repr(float(self.nu)),
            "n": "" if self.n is None else str(int(self.n)),
            "count": str(int(self.count)),
            "seed": "" if self.seed is None else str(int(self.seed)),
            "sampler": self.sampler,
            "candidate_count": str(int(self.candidate_count)),
        }


# --------------------------------------------------------------------------
# packing on a distance matrix
# --------------------------------------------------------------------------


def _check_distances(distances) -> np.ndarray:
    D = check_array(distances, dtype=np.float64, ensure_min_samples=1,
                    ensure_min_features=1)
    if D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.allclose(D, D.T, rtol=0.0, atol=1e-12):
        raise ValueError("distance matrix must be symmetric")
    if np.any(np.diag(D) != 0.0):
        raise ValueError("distance matrix must have a zero diagonal")
    return D


def greedy_separated(distances, delta: float, atol: float = SEPARATION_ATOL) -> np.ndarray:
    """Index-order greedy maximal ``delta``-separated subset."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    D = _check_distances(distances)
    blocked = np.zeros(len(D), dtype=bool)
    kept = []
    for i in range(len(D)):
        if not blocked[i]:
            kept.append(i)
            blocked |= D[i] < delta - atol
    return np.array(kept, dtype=np.int64)


def greedy_by_rows(row_distances, size: int, delta: float,
                   atol: float = SEPARATION_ATOL) -> np.ndarray:
    """Same selection as ``greedy_separated`` with rows computed on demand."""
    blocked = np.zeros(size, dtype=bool)
    kept = []
    for i in range(size):
        if not blocked[i]:
            kept.append(i)
            blocked |= row_distances(i) < delta - atol
    return np.array(kept, dtype=np.int64)


def _color_bound(P: int, adj: list[int]):
    """Greedy coloring of the vertices in bitset ``P`` (vertices, colors)."""
    order, colors = [], []
    color = 0
    Q = P
    while Q:
        color += 1
        avail = Q
        while avail:
            low = avail & -avail
            v = low.bit_length() - 1
            avail &= ~adj[v] & ~low
            Q &= ~low
            order.append(v)
            colors.append(color)
    return order, colors


def exact_max_separated(distances, delta: float, limit: int = EXACT_LIMIT,
                        atol: float = SEPARATION_ATOL):
    """Maximum ``delta``-separated subset by branch and bound on cliques.

    Returns ``(size, indices)``.
    """
    D = _check_distances(distances)
    N = len(D)
    if N > limit:
        raise SizeLimitError(f"{N} candidates exceed the exact-solver limit {limit}")
    sep = D >= delta - atol
    adj = [sum(1 << j for j in range(N) if j != i and sep[i, j]) for i in range(N)]
    best = list(greedy_separated(D, delta, atol))

    def expand(R, P):
        nonlocal best
        order, colors = _color_bound(P, adj)
        for v, c in zip(reversed(order), reversed(colors)):
            if len(R) + c <= len(best):
                return
            Rv = R + [v]
            Pv = P & adj[v]
            if Pv:
                expand(Rv, Pv)
            elif len(Rv) > len(best):
                best = Rv
            P &= ~(1 << v)

    expand([], (1 << N) - 1)
    return len(best), np.array(sorted(best), dtype=np.int64)


class GreedyPacking(BaseEstimator):
    """Separated subset of a precomputed distance matrix.

    Parameters
    ----------
    delta : float
        Separation threshold.
    method : {'greedy', 'exact'}
    limit : int
        Size limit of the exact solver.
    """

    def __init__(self, delta=0.1, method="greedy", limit=EXACT_LIMIT):
        self.delta = delta
        self.method = method
        self.limit = limit

    def fit(self, X, y=None):
        if self.method == "greedy":
            self.indices_ = greedy_separated(X, self.delta)
        elif self.method == "exact":
            _, self.indices_ = exact_max_separated(X, self.delta, self.limit)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.n_selected_ = len(self.indices_)
        return self

    def transform(self, X):
        """Restrict a square matrix to the selected rows and columns."""
        check_is_fitted(self, "indices_")
        X = check_array(X)
        return X[np.ix_(self.indices_, self.indices_)]


# --------------------------------------------------------------------------
# translation-invariant grids
# --------------------------------------------------------------------------


def _lattice_offsets(shape) -> np.ndarray:
    return np.indices(tuple(shape)).reshape(len(shape), -1).T.astype(np.int64)


def _offset_norms(system, V, t0, size):
    diffs = system.difference_orbit(V, size, t0)
    return system.base_distance(diffs, np.zeros_like(diffs))


def _lattice_forbidden(system, lattice, stat, n, delta, nu=None,
                       checkpoint_count=DEFAULT_CHECKPOINTS, atol=SEPARATION_ATOL,
                       offset_chunk=1 << 16, time_chunk=256):
    """Lattice offsets whose pair statistic stays below the threshold."""
    steps, shape = lattice
    offsets = _lattice_offsets(shape)
    thresh = delta - atol
    marks = checkpoint_schedule(n, checkpoint_count) if stat == "asymptotic" else None
    forbidden = []
    for lo in range(0, len(offsets), offset_chunk):
        block = offsets[lo:lo + offset_chunk]
        V = (block * steps) % 1.0
        if stat == "bowen":
            active = np.ones(len(V), dtype=bool)
            t0 = 0
            while t0 < n:
                idx = np.flatnonzero(active)
                if idx.size == 0:
                    break
                # most offsets separate within a few steps, so start short
                size = min(n - t0, max(4, (1 << 20) // idx.size))
                far = (_offset_norms(system, V[idx], t0, size) >= thresh).any(axis=0)
                active[idx[far]] = False
                t0 += size
            close = active
        else:
            sums = np.zeros(len(V))
            hits = np.zeros(len(V), dtype=np.int64)
            freq = np.zeros(len(V))
            bounds = sorted(set(range(0, n, time_chunk)) | {n} | set(
                [] if marks is None else marks.tolist()))
            for a, b in zip(bounds[:-1], bounds[1:]):
                norms = _offset_norms(system, V, a, b - a)
                sums += norms.sum(axis=0)
                hits += (norms >= thresh).sum(axis=0)
                if marks is not None and b in marks:
                    np.maximum(freq, hits / b, out=freq)
            if stat == "hamming":
                close = sums / n < thresh
            else:
                close = freq < nu - atol
        forbidden.append(block[close])
    return np.concatenate(forbidden)


def _lattice_greedy(system, lattice, stat, n, delta, nu=None, **kw):
    steps, shape = lattice
    forbidden = _lattice_forbidden(system, lattice, stat, n, delta, nu, **kw)
    # offsets are symmetric in distance, blocking both signs is harmless
    forbidden = np.unique(np.concatenate([forbidden, (-forbidden) % shape]), axis=0)
    kept = _kernels.lattice_greedy(np.asarray(shape, dtype=np.int64), forbidden,
                                   int(np.prod(shape)))
    return np.flatnonzero(kept)


# --------------------------------------------------------------------------
# symbolic fast paths
# --------------------------------------------------------------------------

_HASH_BASES = (0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F)
_MASK64 = (1 << 64) - 1


def _contiguous_runs(values: np.ndarray):
    """Split sorted unique integers into runs of consecutive values."""
    if values.size == 0:
        return []
    cut = np.flatnonzero(np.diff(values) != 1) + 1
    return np.split(values, cut)


def _fringe_codes(seq: np.ndarray, K: int) -> np.ndarray:
    """Integer code of every length-``K`` window, first symbol most significant."""
    weights = (1 << np.arange(K - 1, -1, -1, dtype=np.int64))
    return sliding_window_view(seq.astype(np.int64), K) @ weights


def _window_hashes(seq: np.ndarray, n: int, base: int) -> np.ndarray:
    """Polynomial hash mod 2**64 of every length-``n`` window of ``seq``."""
    L = seq.size
    b = np.full(L, base, dtype=np.uint64)
    b[0] = 1
    powers = np.cumprod(b, dtype=np.uint64)
    prefix = np.zeros(L + 1, dtype=np.uint64)
    np.cumsum((seq.astype(np.uint64) + np.uint64(1)) * powers, dtype=np.uint64, out=prefix[1:])
    count = L - n + 1
    inv = pow(base, -1, 1 << 64)
    ib = np.full(count, inv, dtype=np.uint64)
    ib[0] = 1
    unshift = np.cumprod(ib, dtype=np.uint64)
    return (prefix[n:] - prefix[:count]) * unshift


def interior_fringe_keys(system, centers: np.ndarray, n: int):
    """Interior hashes and fringe codes of the words seen by ``d_n``.

    For offset ``m`` the interior is ``omega[m .. m+n-1]``, the left fringe
    ``omega[m-1], .., omega[m-K]`` and the right fringe
    ``omega[m+n], .., omega[m+n+K-1]``.
    """
    K = system.radius
    N = centers.size
    h1 = np.empty(N, dtype=np.uint64)
    h2 = np.empty(N, dtype=np.uint64)
    left = np.empty(N, dtype=np.int64)
    right = np.empty(N, dtype=np.int64)
    order = np.argsort(centers, kind="stable")
    sorted_centers = centers[order]
    pos = 0
    for run in _contiguous_runs(sorted_centers):
        lo, hi = int(run[0]), int(run[-1])
        seq = system.source.symbols(np.arange(lo - K, hi + n + K, dtype=np.int64))
        dest = order[pos:pos + run.size]
        pos += run.size
        inner = seq[K:K + (hi - lo) + n]
        h1[dest] = _window_hashes(inner, n, _HASH_BASES[0])
        h2[dest] = _window_hashes(inner, n, _HASH_BASES[1])
        # left fringe read backwards from m-1
        rev = _fringe_codes(seq[:K + hi - lo][::-1], K)[::-1]
        left[dest] = rev
        right[dest] = _fringe_codes(seq[K + n:], K)[: run.size]
    return h1, h2, left, right


def _symbolic_bowen_greedy(system, centers, n, delta, atol=SEPARATION_ATOL):
    """Greedy ``d_n`` packing of shift offsets, exact for ``delta <= 1`` and ``n > K``.

    Any interior mismatch puts a full unit weight at some time, so such
    pairs are separated.  With equal interiors only the fringes contribute
    and ``d_n`` equals the larger fringe term, a dyadic rational.
    """
    K = system.radius
    h1, h2, left, right = interior_fringe_keys(system, centers, n)
    order = np.lexsort((np.arange(centers.size), h2, h1))
    key1, key2 = h1[order], h2[order]
    new = np.ones(order.size, dtype=bool)
    new[1:] = (key1[1:] != key1[:-1]) | (key2[1:] != key2[:-1])
    starts = np.append(np.flatnonzero(new), order.size).astype(np.int64)
    thresh = max(0, math.ceil((delta - atol) * 2.0 ** K))
    kept = _kernels.grouped_fringe_greedy(starts, order.astype(np.int64), left, right, thresh)
    return np.flatnonzero(kept)


def _row_greedy_weighted(words: np.ndarray, weights: np.ndarray, delta: float,
                         scale: float = 1.0, atol=SEPARATION_ATOL):
    """Greedy under ``sum_j w_j |s_j - t_j|`` for 0/1 rows of ``words``."""
    W = words
    self_terms = W @ weights

    def row(i):
        wi = W[i] * weights
        return (self_terms + self_terms[i] - 2.0 * (W @ wi)).astype(np.float64) * scale

    return greedy_by_rows(row, W.shape[0], delta, atol)


def hamming_weights(system, n: int) -> np.ndarray:
    """Weight of each mismatch position ``-K .. n-1+K`` in ``d-hat_n``."""
    return np.convolve(np.ones(n), system.kernel) / n


# --------------------------------------------------------------------------
# separation numbers
# --------------------------------------------------------------------------


def _matrix_count(D, delta, method, limit):
    if method == "exact":
        _, idx = exact_max_separated(D, delta, limit)
    else:
        idx = greedy_separated(D, delta)
    return idx


def _result(kind, delta, idx, method, cs, n=None, nu=None):
    return SeparationResult(kind=kind, delta=float(delta), count=int(len(idx)), method=method,
                            n=n, nu=nu, sampler=cs.sampler, seed=cs.seed,
                            candidate_count=len(cs), indices=np.asarray(idx, dtype=np.int64))


def _check_method(method):
    if method not in ("greedy", "exact"):
        raise ValueError(f"unknown method {method!r}")


def bowen_separation_number(system: System, n: int, delta: float, candidates,
                            method: str = "greedy", limit: int = EXACT_LIMIT) -> SeparationResult:
    """Separated count under the Bowen metric ``d_n``."""
    _check_method(method)
    cs = as_candidates(system, candidates)
    if method == "greedy" and cs.lattice is not None:
        idx = _lattice_greedy(system, cs.lattice, "bowen", n, delta)
    elif method == "greedy" and system.kind == "symbolic" and delta <= 1.0 and n > system.radius:
        idx = _symbolic_bowen_greedy(system, cs.points, n, delta)
    else:
        D = pair_statistics(system, cs.points, n).bowen
        idx = _matrix_count(D, delta, method, limit)
    return _result("bowen", delta, idx, method, cs, n=n)


def hamming_separation_number(system: System, n: int, delta: float, candidates,
                              method: str = "greedy", limit: int = EXACT_LIMIT) -> SeparationResult:
    """Separated count under the Hamming metric ``d-hat_n``."""
    _check_method(method)
    cs = as_candidates(system, candidates)
    if method == "greedy" and cs.lattice is not None:
        idx = _lattice_greedy(system, cs.lattice, "hamming", n, delta)
    elif method == "greedy" and system.kind == "symbolic":
        K = system.radius
        words = system.words(cs.points, -K, n - 1 + K).astype(np.float64)
        idx = _row_greedy_weighted(words, hamming_weights(system, n), delta)
    else:
        D = pair_statistics(system, cs.points, n).hamming
        idx = _matrix_count(D, delta, method, limit)
    return _result("hamming", delta, idx, method, cs, n=n)


def asymptotic_separation_numbers(system: System, delta: float, nus, candidates,
                                  horizon: int, method: str = "greedy",
                                  checkpoint_count: int = DEFAULT_CHECKPOINTS,
                                  limit: int = EXACT_LIMIT) -> list[SeparationResult]:
    """``S*_nu`` for several ``nu`` sharing one frequency computation."""
    _check_method(method)
    if horizon < 4:
        raise ValueError("horizon must be at least 4")
    nus = [float(v) for v in np.atleast_1d(nus)]
    if any(not 0.0 < v <= 1.0 for v in nus):
        raise ValueError("nu must lie in (0, 1]")
    cs = as_candidates(system, candidates)
    out = []
    if method == "greedy" and cs.lattice is not None:
        for nu in nus:
            idx = _lattice_greedy(system, cs.lattice, "asymptotic", horizon, delta, nu,
                                  checkpoint_count=checkpoint_count)
            out.append(_result("asymptotic", delta, idx, method, cs, n=horizon, nu=nu))
        return out
    F = pair_statistics(system, cs.points, horizon, delta=delta,
                        checkpoint_count=checkpoint_count, atol=SEPARATION_ATOL).frequency
    for nu in nus:
        idx = _matrix_count(F, nu, method, limit)
        out.append(_result("asymptotic", delta, idx, method, cs, n=horizon, nu=nu))
    return out


def asymptotic_separation_number(system: System, delta: float, nu: float, candidates,
                                 horizon: int, method: str = "greedy",
                                 checkpoint_count: int = DEFAULT_CHECKPOINTS) -> SeparationResult:
    """Separated count under the frequency proxy ``nu_delta`` at level ``nu``."""
    return asymptotic_separation_numbers(system, delta, [nu], candidates, horizon,
                                         method, checkpoint_count)[0]


def subword_separation_number(source, n: int, delta: float, centers,
                              method: str = "greedy", limit: int = EXACT_LIMIT) -> SeparationResult:
    """Separated count of the length ``2n+1`` words centered at ``centers`` under ``D_n``."""
    _check_method(method)
    cs = centers if isinstance(centers, CandidateSet) else CandidateSet(
        np.asarray(centers, dtype=np.int64), "explicit")
    m = np.asarray(cs.points, dtype=np.int64).reshape(-1)
    j = np.arange(-n, n + 1, dtype=np.int64)
    length = 2 * n + 1
    if method == "exact":
        words = source.symbols(m[:, None] + j[None, :]).astype(np.float64)
        D = (words[:, None, :] != words[None, :, :]).sum(axis=2) / length
        _, idx = exact_max_separated(D, delta, limit)
    else:
        # integer mismatch counts stay exact in float32 below 2**24
        words = np.empty((m.size, length), dtype=np.float32)
        for lo in range(0, m.size, 256):
            words[lo:lo + 256] = source.symbols(m[lo:lo + 256, None] + j[None, :])
        idx = _row_greedy_weighted(words, np.ones(length, dtype=np.float32), delta,
                                   scale=1.0 / length)
    return _result("subword", delta, idx, method, cs, n=n)


# --------------------------------------------------------------------------
# witnesses
# --------------------------------------------------------------------------


@dataclass
class WitnessReport:
    n_block: int
    horizon: int
    points: np.ndarray = field(repr=False)
    stays_on_plateau: bool
    min_distance: float
    worst_pair: tuple[int, int]
    tol: float

    @property
    def passed(self) -> bool:
        return self.stays_on_plateau and self.min_distance >= 0.25 - self.tol


def counterexample_witness_set(n_block: int, system: SkewProduct | None = None,
                               tol: float = 1e-6) -> tuple[np.ndarray, WitnessReport]:
    """Points ``(x_j, 0)`` that stay quarter-separated in the Hamming metric.

    All points sit on the plateau ``I_n`` where the horizontal speed is the
    same, so their first coordinates move together while the vertical
    rotation speeds differ by multiples of the spacing.
    """
    system = system or SkewProduct()
    pts = witness_candidates(n_block).points
    horizon = 2 ** (2 * n_block + 2)
    lo, hi = AlphaProfile.plateau(n_block)
    xs = pts[:, 0].copy()
    on_plateau = True
    for _ in range(horizon):
        if xs.min() < lo or xs.max() > hi:
            on_plateau = False
            break
        xs = system.step(np.stack([xs, np.zeros_like(xs)], axis=1))[:, 0]
    H = pair_statistics(system, pts, horizon).hamming
    iu = np.triu_indices(len(pts), 1)
    k = int(np.argmin(H[iu]))
    worst = (int(iu[0][k]), int(iu[1][k]))
    report = WitnessReport(n_block, horizon, pts, on_plateau, float(H[worst]), worst, tol)
    return pts, report


@dataclass
class TransferCheck:
    n: int
    separated: bool
    consistent: bool
    min_distance: float

    @property
    def passed(self) -> bool:
        return self.separated and self.consistent


def sep_to_bowen_witness(system: System, delta: float, nu: float, witness,
                         horizon: int) -> tuple[int, TransferCheck]:
    """Smallest ``n <= horizon`` making a frequency-separated set ``d_n``-separated.

    A pair with positive separation frequency must be ``delta`` apart at some
    time; the answer is one past the latest first such time.
    """
    pts = as_candidates(system, witness).points
    if len(pts) < 2:
        return 1, TransferCheck(1, True, True, math.inf)
    first = first_separation_times(system, pts, delta, horizon, atol=SEPARATION_ATOL)
    iu = np.triu_indices(len(pts), 1)
    if np.any(first[iu] < 0):
        raise HorizonExhaustedError(f"some pair is never {delta}-apart within {horizon} steps")
    n = int(first[iu].max()) + 1
    bowen = pair_statistics(system, pts, n).bowen[iu]
    separated = bool(np.all(bowen >= delta - SEPARATION_ATOL))
    # frequency separation forces a hit inside the frequency window
    consistent = bool(np.all(first[iu] < horizon))
    return n, TransferCheck(n, separated, consistent, float(bowen.min()))
