"""Growth exponents of separation numbers.

Power-law exponents are read off least-squares lines in log-log
coordinates; local slopes between consecutive samples bracket the upper and
lower exponents.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .separation import (
    SeparationResult,
    asymptotic_separation_numbers,
    bowen_separation_number,
    hamming_separation_number,
    witness_candidates,
)
from .systems import SkewProduct, System

DEFAULT_DELTAS = (0.4, 0.25, 0.15, 0.1)
QUANTITIES = ("pow", "mod")


@dataclass
class GrowthEstimate:
    slope: float
    intercept: float
    r_squared: float
    local_slopes: list = field(default_factory=list)
    window: tuple = (0, 0)
    delta_schedule: list = field(default_factory=list)

    @property
    def upper(self) -> float:
        return max((s for _, s in self.local_slopes), default=self.slope)

    @property
    def lower(self) -> float:
        return min((s for _, s in self.local_slopes), default=self.slope)


def _samples(samples, y=None):
    if y is None:
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("samples must be (n, count) pairs")
        n, c = arr[:, 0], arr[:, 1]
    else:
        n = column_or_1d(np.asarray(samples, dtype=float))
        c = column_or_1d(np.asarray(y, dtype=float))
    if n.size < 3 or n.size != c.size:
        raise ValueError("need at least three (n, count) samples")
    if np.any(np.diff(n) <= 0) or n[0] <= 0:
        raise ValueError("n must be positive and strictly increasing")
    if np.any(c < 1) or np.any(~np.isfinite(c)):
        raise ValueError("counts must be finite and at least 1")
    return n, c


def fit_power_law(samples, counts=None, delta_schedule=()) -> GrowthEstimate:
    """Fit ``log count = slope * log n + intercept``.

    Accepts ``(n, count)`` pairs or two parallel arrays.
    """
    n, c = _samples(samples, counts)
    x, y = np.log(n), np.log(c)
    if np.all(c == c[0]):
        # constant counts: flat line, perfect fit by convention
        slope, intercept, r2 = 0.0, float(y[0]), 1.0
    else:
        slope, intercept = np.polyfit(x, y, 1)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
        r2 = max(0.0, 1.0 - ss_res / ss_tot)
    local = [(int(n[i]) if float(n[i]).is_integer() else float(n[i]),
              float((y[i + 1] - y[i]) / (x[i + 1] - x[i])))
             for i in range(n.size - 1)]
    return GrowthEstimate(float(slope), float(intercept), float(r2), local,
                          (float(n[0]), float(n[-1])), list(delta_schedule))


class PowerLawFit(BaseEstimator, RegressorMixin):
    """Log-log regressor ``count ~ exp(intercept) * n**slope``."""

    def fit(self, X, y):
        X = check_array(X, ensure_2d=False)
        est = fit_power_law(column_or_1d(X), y)
        self.slope_ = est.slope
        self.intercept_ = est.intercept
        self.r_squared_ = est.r_squared
        self.local_slopes_ = est.local_slopes
        self.estimate_ = est
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        n = column_or_1d(check_array(X, ensure_2d=False))
        return np.exp(self.intercept_) * n ** self.slope_


# --------------------------------------------------------------------------
# entropy from separation numbers
# --------------------------------------------------------------------------


@dataclass
class EntropyEstimate:
    quantity: str
    per_delta: dict
    results: list = field(repr=False, default_factory=list)

    @property
    def slope(self) -> float:
        """Largest fitted slope over the delta schedule."""
        return max(e.slope for e in self.per_delta.values())


def _run_jobs(fn, keys, threads: int):
    if threads <= 1:
        return {k: fn(k) for k in keys}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        values = list(pool.map(fn, keys))
    return dict(zip(keys, values))


def entropy_estimate(system: System, quantity: str, deltas, ns, candidates,
                     method: str = "greedy", threads: int = 1) -> EntropyEstimate:
    """Power (``pow``, Bowen) or modified power (``mod``, Hamming) entropy.

    Each ``(delta, n)`` count is an independent job; results are keyed by
    ``(delta, n)`` so the worker count cannot change the output.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}")
    deltas = [float(d) for d in deltas]
    ns = [int(n) for n in ns]
    if not deltas or not ns:
        raise ValueError("schedules must be nonempty")
    counter = bowen_separation_number if quantity == "pow" else hamming_separation_number
    keys = [(d, n) for d in deltas for n in ns]
    found = _run_jobs(lambda k: counter(system, k[1], k[0], candidates, method), keys, threads)
    per_delta = {}
    for d in deltas:
        counts = [found[(d, n)].count for n in ns]
        per_delta[d] = fit_power_law(ns, counts, [d])
    return EntropyEstimate(quantity, per_delta, [found[k] for k in keys])


def witness_growth(n_blocks=range(3, 8), system: SkewProduct | None = None,
                   delta: float = 0.25) -> tuple[list[SeparationResult], GrowthEstimate]:
    """Hamming counts of the plateau witness sets at their natural horizons."""
    system = system or SkewProduct()
    results = []
    for k in n_blocks:
        cs = witness_candidates(k)
        res = hamming_separation_number(system, 2 ** (2 * k + 2), delta, cs)
        res.method = "witness"
        results.append(res)
    est = fit_power_law([r.n for r in results], [r.count for r in results], [delta])
    return results, est


def amorphic_estimate(system: System, delta: float, nus, candidates, horizon: int,
                      method: str = "greedy"):
    """Fit ``log S*_nu`` against ``-log nu``; returns ``(estimate, results)``."""
    nus = sorted((float(v) for v in nus), reverse=True)
    if len(nus) < 3 or not all(0.0 < v < 1.0 for v in nus):
        raise ValueError("need at least three nu values in (0, 1)")
    results = asymptotic_separation_numbers(system, delta, nus, candidates, horizon, method)
    est = fit_power_law([1.0 / v for v in nus], [r.count for r in results], [delta])
    return est, results


class PowerEntropyEstimator(BaseEstimator):
    """Growth exponent of Bowen (``pow``) or Hamming (``mod``) separation numbers.

    ``fit`` takes the candidate points (or a ``CandidateSet``) as ``X``.
    """

    def __init__(self, system=None, quantity="pow", deltas=DEFAULT_DELTAS,
                 ns=(16, 32, 64, 128, 256), method="greedy", threads=1):
        self.system = system
        self.quantity = quantity
        self.deltas = deltas
        self.ns = ns
        self.method = method
        self.threads = threads

    def fit(self, X, y=None):
        est = entropy_estimate(self.system, self.quantity, self.deltas, self.ns, X,
                               self.method, self.threads)
        self.estimates_ = est.per_delta
        self.results_ = est.results
        self.slope_ = est.slope
        return self


class AmorphicComplexityEstimator(BaseEstimator):
    """Growth exponent of ``S*_nu`` in ``1/nu``."""

    def __init__(self, system=None, delta=0.1, nus=(0.25, 0.125, 0.0625, 0.03125),
                 horizon=4096, method="greedy"):
        self.system = system
        self.delta = delta
        self.nus = nus
        self.horizon = horizon
        self.method = method

    def fit(self, X, y=None):
        est, results = amorphic_estimate(self.system, self.delta, self.nus, X,
                                         self.horizon, self.method)
        self.estimate_ = est
        self.results_ = results
        self.slope_ = est.slope
        return self


# --------------------------------------------------------------------------
# general scale functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleFamily:
    """Scale function ``a(s, n)``, strictly increasing in both arguments."""

    name: str
    evaluator: Callable[[float, float], float]
    s_min: float = 0.0
    s_max: float = 64.0

    def __call__(self, s, n):
        return self.evaluator(s, n)

    def is_monotone(self, s_grid=None, n_grid=None) -> bool:
        # a(s_min, n) may be flat in n (n**0 = 1), so probe strictly inside
        s_grid = np.linspace(self.s_min, min(self.s_max, 4.0), 9)[1:] if s_grid is None else s_grid
        n_grid = np.array([2.0, 4.0, 16.0, 64.0]) if n_grid is None else n_grid
        vals = np.array([[self(s, n) for n in n_grid] for s in s_grid])
        return bool(np.all(vals > 0) and np.all(np.diff(vals, axis=0) > 0)
                    and np.all(np.diff(vals, axis=1) > 0))


POWER = ScaleFamily("power", lambda s, n: n ** s)
EXPONENTIAL = ScaleFamily("exponential", lambda s, n: math.exp(s * n))
LOG_POWER = ScaleFamily("log-power", lambda s, n: math.log(n + 1.0) ** s)


def _evaluate(family: ScaleFamily, s: float, n: float) -> float:
    try:
        return family(s, n)
    except OverflowError:
        return math.inf


def _solve_scale(family: ScaleFamily, n: float, count: float, tol: float) -> float:
    lo, hi = family.s_min, family.s_max
    if _evaluate(family, lo, n) > count or _evaluate(family, hi, n) < count:
        raise ValueError(f"{family.name} family cannot reach count {count} at n={n}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _evaluate(family, mid, n) < count:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scale_entropy(samples, family: ScaleFamily = POWER, window=None, counts=None,
                  tol: float = 1e-12) -> tuple[float, float]:
    """Upper and lower exponents ``s`` with ``a(s, n) = count`` over a window.

    ``window`` is ``(n_min, n_max)``; the default is the tail half of the
    samples.
    """
    n, c = _samples(samples, counts)
    if window is None:
        keep = np.arange(n.size) >= n.size // 2
    else:
        keep = (n >= window[0]) & (n <= window[1])
    if not keep.any():
        raise ValueError("window contains no samples")
    s = [_solve_scale(family, float(ni), float(ci), tol) for ni, ci in zip(n[keep], c[keep])]
    return max(s), min(s)


def exponential_rate(samples, counts=None) -> float:
    """Largest ``log(count) / n`` over the tail half of the samples."""
    n, c = _samples(samples, counts)
    tail = slice(n.size // 2, None)
    return float(np.max(np.log(c[tail]) / n[tail]))
