"""Toeplitz sequences: the irregular block construction and a regular baseline.

The irregular sequence is built from a periodic structure ``a_{n+1} = 2 b_n a_n``.
Position ``k`` has level ``n`` when ``n`` is the least index with
``k in A_n = {-a_n .. a_n} + a_{n+1} Z``; odd levels carry 0, even levels 1.
All period arithmetic uses Python integers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

_INT64_SAFE = 1 << 62


class DepthExceededError(ValueError):
    """A position is not covered by the materialised levels."""


@dataclass(frozen=True)
class ToeplitzSpec:
    """Periodic structure of the irregular Toeplitz sequence.

    Parameters
    ----------
    a1 : int
        First period.
    b : tuple of int, optional
        Explicit schedule ``b_1, b_2, ...``.  When omitted, ``b_n = 2**(n+1)``.
    depth : int, optional
        Number of levels materialised; periods ``a_1 .. a_{depth+1}`` are
        derived.  Defaults to ``len(b)`` for explicit schedules and 8 otherwise.
    """

    a1: int = 2
    b: tuple[int, ...] | None = None
    depth: int | None = None

    def __post_init__(self):
        if self.a1 < 1:
            raise ValueError("a1 must be a positive integer")
        if self.b is not None:
            object.__setattr__(self, "b", tuple(int(v) for v in self.b))
            if any(v < 2 for v in self.b):
                raise ValueError("every b_n must be at least 2")
        if self.depth is None:
            object.__setattr__(self, "depth", len(self.b) if self.b is not None else 8)
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.b is not None and len(self.b) < self.depth:
            raise ValueError("explicit schedule shorter than depth")

    def b_at(self, n: int) -> int:
        """``b_n`` for ``n >= 1``; past an explicit list the schedule keeps doubling."""
        if self.b is None:
            return 2 ** (n + 1)
        if n <= len(self.b):
            return self.b[n - 1]
        return self.b[-1] * 2 ** (n - len(self.b))

    @cached_property
    def periods(self) -> tuple[int, ...]:
        """``(a_1, ..., a_{depth+1})``."""
        a = [self.a1]
        for n in range(1, self.depth + 1):
            a.append(2 * self.b_at(n) * a[-1])
        return tuple(a)

    def a(self, n: int) -> int:
        return self.periods[n - 1]

    def describe(self) -> str:
        b = ",".join(str(v) for v in self.b) if self.b is not None else "2^(n+1)"
        return f"toeplitz(a1={self.a1}, b={b}, depth={self.depth})"

    def symbols(self, positions) -> np.ndarray:
        return symbols(self, positions)


def derive_periods(spec: ToeplitzSpec) -> tuple[int, ...]:
    return spec.periods


def _in_block(spec: ToeplitzSpec, n: int, k: np.ndarray, kmax: int) -> np.ndarray:
    an, an1 = spec.a(n), spec.a(n + 1)
    if an1 - an > kmax:
        # no translate other than the central block reaches |k| <= kmax
        return np.abs(k) <= an
    if an1 < _INT64_SAFE:
        r = np.mod(k, an1)
        return (r <= an) | (r >= an1 - an)
    flat = [((int(v) % an1) <= an) or ((int(v) % an1) >= an1 - an) for v in k.ravel()]
    return np.array(flat, dtype=bool).reshape(k.shape)


def levels(spec: ToeplitzSpec, positions, strict: bool = True) -> np.ndarray:
    """Least ``n`` with ``k in A_n`` for every position (vectorised).

    Positions outside ``B_depth`` raise unless ``strict`` is false, in which
    case they get level 0.
    """
    k = np.asarray(positions, dtype=np.int64)
    out = np.zeros(k.shape, dtype=np.int64)
    if k.size == 0:
        return out
    kmax = int(np.max(np.abs(k)))
    todo = np.ones(k.shape, dtype=bool)
    for n in range(1, spec.depth + 1):
        if not todo.any():
            break
        idx = np.nonzero(todo)
        hit = _in_block(spec, n, k[idx], kmax)
        sel = tuple(i[hit] for i in idx)
        out[sel] = n
        todo[sel] = False
    if strict and todo.any():
        bad = int(k[todo].ravel()[0])
        raise DepthExceededError(f"position {bad} lies outside B_{spec.depth}")
    return out


def level_of(spec: ToeplitzSpec, k: int) -> int:
    return int(levels(spec, np.array([k]))[0])


def symbols(spec: ToeplitzSpec, positions) -> np.ndarray:
    """0 on odd levels, 1 on even levels."""
    return (1 - levels(spec, positions) % 2).astype(np.uint8)


def symbol_at(spec: ToeplitzSpec, k: int) -> int:
    return int(symbols(spec, np.array([k]))[0])


def window(spec, m: int, N: int) -> np.ndarray:
    """Subword of length ``2N+1`` centred at ``m`` (works for any source)."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return spec.symbols(np.arange(m - N, m + N + 1, dtype=np.int64))


# --------------------------------------------------------------------------
# exact densities
# --------------------------------------------------------------------------


def _block_counts(spec: ToeplitzSpec, n: int) -> tuple[list[int], list[int]]:
    """Residue counts of ``B_i`` mod ``a_{i+1}`` and ones among them, ``i = 1..n``.

    ``[-a_i, a_i]`` covers two full periods of the ``a_i``-periodic set
    ``B_{i-1}`` plus the position 0, which always belongs to ``B_1``.  The
    remaining ``2 (a_i - c_{i-1})`` positions of the block are new level-``i``
    positions.
    """
    if n > spec.depth:
        raise DepthExceededError(f"level {n} exceeds depth {spec.depth}")
    counts, ones = [], []
    for i in range(1, n + 1):
        ai, ai1 = spec.a(i), spec.a(i + 1)
        if i == 1:
            c_prev, o_prev, fresh = 0, 0, 2 * ai + 1
        else:
            c_prev, o_prev = counts[-1], ones[-1]
            fresh = 2 * (ai - c_prev)
        reps = ai1 // ai
        counts.append(c_prev * reps + fresh)
        ones.append(o_prev * reps + (fresh if i % 2 == 0 else 0))
    return counts, ones


def periodic_density(spec: ToeplitzSpec, n: int) -> Fraction:
    """Exact density of ``B_n``, the set of ``a_{n+1}``-periodic positions."""
    if n == 0:
        return Fraction(0)
    counts, _ = _block_counts(spec, n)
    return Fraction(counts[-1], spec.a(n + 1))


def residue_density_bruteforce(spec: ToeplitzSpec, n: int) -> Fraction:
    """Count residues of ``A_1 u ... u A_n`` mod ``a_{n+1}`` one by one."""
    mod = spec.a(n + 1)
    if mod > 1 << 27:
        raise ValueError("period too large for brute-force counting")
    hit = np.zeros(mod, dtype=bool)
    for i in range(1, n + 1):
        ai, ai1 = spec.a(i), spec.a(i + 1)
        base = np.arange(-ai, ai + 1)
        for shift in range(0, mod, ai1):
            hit[(base + shift) % mod] = True
    return Fraction(int(hit.sum()), mod)


def block_one_frequency(spec: ToeplitzSpec, n: int) -> Fraction:
    """Exact frequency of the symbol 1 on the central block ``[-a_n, a_n]``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    an = spec.a(n)
    size = 2 * an + 1
    if n == 1:
        return Fraction(0 if n % 2 else size, size)
    counts, ones = _block_counts(spec, n - 1)
    c_prev, o_prev = counts[-1], ones[-1]
    # position 0 has level 1 and carries 0
    fresh = size - (2 * c_prev + 1)
    total = 2 * o_prev + (fresh if n % 2 == 0 else 0)
    return Fraction(total, size)


@dataclass
class IrregularityCertificate:
    partial_sums: list[Fraction]
    densities: list[Fraction]
    tail_bound: Fraction
    verdict: str

    @property
    def limit_bound(self) -> Fraction:
        return self.partial_sums[-1] + self.tail_bound


def density_bound_terms(spec: ToeplitzSpec, n: int) -> list[Fraction]:
    """``(2 a_i + 1) / a_{i+1}``, the density of ``A_i``, for ``i = 1..n``."""
    return [Fraction(2 * spec.a(i) + 1, spec.a(i + 1)) for i in range(1, n + 1)]


def irregularity_certificate(spec: ToeplitzSpec) -> IrregularityCertificate:
    """Certify irregularity when the density bound stays below 1.

    Beyond the materialised depth the schedule is continued by doubling, so
    the tail of ``sum 1/b_i`` is at most ``1/b_d`` and the tail of
    ``sum 1/a_{i+1}`` at most ``(4/3)/a_{d+2}``.
    """
    d = spec.depth
    if d < 2:
        raise ValueError("depth must be at least 2")
    terms = density_bound_terms(spec, d)
    partial, acc = [], Fraction(0)
    for t in terms:
        acc += t
        partial.append(acc)
    densities = [periodic_density(spec, n) for n in range(1, d + 1)]
    a_next = 2 * spec.b_at(d + 1) * spec.a(d + 1)
    tail = Fraction(1, spec.b_at(d)) + Fraction(4, 3 * a_next)
    consistent = all(dn <= s for dn, s in zip(densities, partial))
    verdict = "irregular" if consistent and partial[-1] + tail < 1 else "inconclusive"
    return IrregularityCertificate(partial, densities, tail, verdict)


@dataclass
class PeriodicityReport:
    n: int
    probe_range: int
    checked: int = 0
    violations: list[tuple[int, int]] = field(default_factory=list)
    witness: tuple[int, int] | None = None

    @property
    def passed(self) -> bool:
        return not self.violations and (self.n == 0 or self.witness is not None)


def verify_periodic_structure(spec: ToeplitzSpec, n: int, probe_range: int) -> PeriodicityReport:
    """Check that ``B_n`` is ``a_{n+1}``-periodic and that ``C_{n+1}`` is not."""
    report = PeriodicityReport(n, probe_range)
    if n == 0:
        return report
    if n + 1 > spec.depth:
        raise DepthExceededError("need depth >= n + 1")
    period = spec.a(n + 1)
    k = np.arange(-probe_range, probe_range + 1, dtype=np.int64)
    # only membership in B_n matters here, so uncovered positions are fine
    lev = levels(spec, k, strict=False)
    periodic = k[(lev >= 1) & (lev <= n)]
    base = symbols(spec, periodic)
    for ell in range(-4, 5):
        if ell == 0:
            continue
        other = symbols(spec, periodic + ell * period)
        bad = np.nonzero(other != base)[0]
        report.checked += periodic.size
        report.violations.extend((int(periodic[i]), ell) for i in bad[:10])
    # a level-(n+1) position moved by multiples of a_{n+1} leaves A_{n+1}
    # start near 0 so the shifts reach level n+2, whose parity differs
    candidates = k[lev == n + 1]
    candidates = candidates[np.argsort(np.abs(candidates), kind="stable")]
    if candidates.size == 0:
        # h_1 = a_1 + 1 avoids B_1; h_i = a_i + h_{i-1} avoids B_i and has level i+1
        h = spec.a(1) + 1
        for i in range(2, n + 1):
            h += spec.a(i)
        candidates = np.array([h], dtype=np.int64)
    reach = 2 * spec.b_at(n + 1) + 2
    for k0 in candidates[:16]:
        s0 = symbol_at(spec, int(k0))
        shifted = int(k0) + period * np.arange(1, reach + 1, dtype=np.int64)
        lev_shift = levels(spec, shifted, strict=False)
        differs = (lev_shift > 0) & ((1 - lev_shift % 2) != s0)
        if differs.any():
            report.witness = (int(k0), int(np.argmax(differs)) + 1)
        if report.witness:
            break
    return report


# --------------------------------------------------------------------------
# regular baseline
# --------------------------------------------------------------------------


def _trailing_zeros(k: np.ndarray) -> np.ndarray:
    k = np.abs(np.asarray(k, dtype=np.int64))
    low = k & -k
    tz = np.zeros(k.shape, dtype=np.int64)
    nz = low > 0
    tz[nz] = np.round(np.log2(low[nz].astype(float))).astype(np.int64)
    return tz


@dataclass(frozen=True)
class RegularToeplitz:
    """Trailing-zeros Toeplitz sequence: 1 iff ``v_2(|k|)`` is even; ``omega_0 = 0``."""

    def symbols(self, positions) -> np.ndarray:
        k = np.asarray(positions, dtype=np.int64)
        out = (_trailing_zeros(k) % 2 == 0).astype(np.uint8)
        out[k == 0] = 0
        return out

    def describe(self) -> str:
        return "regular-toeplitz"


def regular_symbol_at(k: int) -> int:
    return int(RegularToeplitz().symbols(np.array([k]))[0])


def regular_periodic_fraction(n: int, shifts: int = 4) -> float:
    """Share of ``k`` in ``[-2**n, 2**n]`` whose symbol survives shifts by ``l * 2**n``."""
    seq = RegularToeplitz()
    k = np.arange(-(2 ** n), 2 ** n + 1, dtype=np.int64)
    base = seq.symbols(k)
    ok = np.ones(k.size, dtype=bool)
    for ell in range(-shifts, shifts + 1):
        if ell:
            ok &= seq.symbols(k + ell * 2 ** n) == base
    return float(ok.mean())


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------


def export_sequence(source, lo: int, hi: int, path) -> Path:
    """Write symbols for ``k = lo..hi`` with a one-line parameter header."""
    path = Path(path)
    describe = getattr(source, "describe", None)
    header = describe() if callable(describe) else type(source).__name__
    syms = source.symbols(np.arange(lo, hi + 1, dtype=np.int64)) if hi >= lo else []
    with path.open("w") as fh:
        fh.write(f"# {header} range={lo}..{hi}\n")
        fh.write("".join(str(int(s)) for s in syms))
        fh.write("\n")
    return path


def export_densities(spec: ToeplitzSpec, path, n_max: int | None = None) -> Path:
    path = Path(path)
    n_max = spec.depth if n_max is None else n_max
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "period", "numerator", "denominator", "bound_numerator", "bound_denominator"])
        acc = Fraction(0)
        for n, term in enumerate(density_bound_terms(spec, n_max), start=1):
            acc += term
            d = periodic_density(spec, n)
            w.writerow([n, spec.a(n + 1), d.numerator, d.denominator, acc.numerator, acc.denominator])
    return path
