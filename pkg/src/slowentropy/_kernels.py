"""Compiled inner loops over pairs of trajectories."""

import numpy as np
from numba import njit


@njit(cache=True)
def pair_block(traj, circle, thresh, sums, maxs, counts):
    """Accumulate sum, max and threshold count of pairwise base distances.

    ``traj`` has shape ``(N, T, D)``; only the upper triangle ``i < j`` of
    the ``(N, N)`` accumulators is touched.  Circle coordinates are assumed
    reduced to ``[0, 1)``.
    """
    N, T, D = traj.shape
    for i in range(N):
        for j in range(i + 1, N):
            s = 0.0
            m = maxs[i, j]
            c = 0
            for t in range(T):
                d = 0.0
                for k in range(D):
                    diff = abs(traj[i, t, k] - traj[j, t, k])
                    if circle[k] and diff > 0.5:
                        diff = 1.0 - diff
                    if diff > d:
                        d = diff
                s += d
                if d > m:
                    m = d
                if d >= thresh:
                    c += 1
            sums[i, j] += s
            maxs[i, j] = m
            counts[i, j] += c


@njit(cache=True)
def first_hits(traj, circle, thresh, t0, first):
    """Record the first time index at which each pair is ``thresh`` apart."""
    N, T, D = traj.shape
    for i in range(N):
        for j in range(i + 1, N):
            if first[i, j] >= 0:
                continue
            for t in range(T):
                d = 0.0
                for k in range(D):
                    diff = abs(traj[i, t, k] - traj[j, t, k])
                    if circle[k] and diff > 0.5:
                        diff = 1.0 - diff
                    if diff > d:
                        d = diff
                if d >= thresh:
                    first[i, j] = t0 + t
                    break


@njit(cache=True)
def lattice_greedy(shape, offsets, order_size):
    """Index-order greedy on a cyclic lattice with forbidden offsets.

    ``offsets`` lists integer offset vectors ``a`` (one per row) whose
    distance is below the threshold; the zero offset must be included.
    Returns a boolean mask over the flattened lattice.
    """
    D = shape.shape[0]
    kept = np.zeros(order_size, dtype=np.bool_)
    blocked = np.zeros(order_size, dtype=np.bool_)
    coord = np.zeros(D, dtype=np.int64)
    for idx in range(order_size):
        if blocked[idx]:
            continue
        kept[idx] = True
        rem = idx
        for c in range(D - 1, -1, -1):
            coord[c] = rem % shape[c]
            rem //= shape[c]
        for r in range(offsets.shape[0]):
            flat = 0
            for c in range(D):
                v = (coord[c] + offsets[r, c]) % shape[c]
                flat = flat * shape[c] + v
            blocked[flat] = True
    return kept


@njit(cache=True)
def grouped_fringe_greedy(starts, order, left, right, thresh):
    """Greedy selection inside groups of words sharing the same interior.

    ``order`` lists candidate indices grouped by interior word (index order
    inside each group), ``starts`` holds group boundaries.  Two members of a
    group are separated iff the xor of their left or right fringe codes
    reaches ``thresh``.
    """
    kept = np.zeros(order.shape[0], dtype=np.bool_)
    buf = np.empty(order.shape[0], dtype=np.int64)
    for g in range(starts.shape[0] - 1):
        nk = 0
        for pos in range(starts[g], starts[g + 1]):
            idx = order[pos]
            ok = True
            for r in range(nk):
                other = buf[r]
                if (left[idx] ^ left[other]) < thresh and (right[idx] ^ right[other]) < thresh:
                    ok = False
                    break
            if ok:
                buf[nk] = idx
                nk += 1
                kept[idx] = True
    return kept
