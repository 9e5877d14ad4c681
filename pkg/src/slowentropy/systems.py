"""Phase spaces, base metrics and one-step maps.

Continuous phase points are float arrays whose last axis holds the
coordinates (``(..., 1)`` for the circle, ``(..., 2)`` for the cylinder
``[0, 1] x T`` and the torus).  Points of a shift system are integer offsets
``m`` into a bi-infinite 0/1 sequence that is evaluated on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Protocol

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

DEFAULT_N_MAX = 20
DEFAULT_EPS = 1.0 / 16.0
DEFAULT_RADIUS = 24


class DomainError(ValueError):
    """A coordinate lies outside the phase space of the map."""


class KindMismatchError(TypeError):
    """Points or systems of incompatible kinds were combined."""


def smoothstep(t):
    """C1 cubic ``3t^2 - 2t^3`` with zero slope at both ends."""
    t = np.asarray(t, dtype=float)
    return t * t * (3.0 - 2.0 * t)


def circle_distance(a, b):
    """Canonical distance on R/Z, ``min(|a-b|, 1-|a-b|)`` after reduction."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def _check_unit(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return x


# --------------------------------------------------------------------------
# interval map tau = id + alpha
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaProfile:
    """Piecewise smoothstep displacement with plateaus on ``I_n``.

    ``alpha`` equals ``2**-(3n+4)`` on ``I_n = [2**-n, 3 * 2**-(n+1)]`` for
    ``3 <= n <= n_max``, rises to ``1/8`` at ``x = 1/2`` and falls back to
    zero at ``x = 1``.  Every segment is a monotone cubic smoothstep, so the
    profile is C1 and its slope stays below one.
    """

    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if self.n_max < 3:
            raise ValueError("n_max must be at least 3")

    @staticmethod
    def plateau_value(n: int) -> float:
        return 2.0 ** -(3 * n + 4)

    @staticmethod
    def plateau(n: int) -> tuple[float, float]:
        return 2.0 ** -n, 3.0 * 2.0 ** -(n + 1)

    @cached_property
    def segments(self) -> np.ndarray:
        """Rows ``(x0, x1, y0, y1)`` sorted by ``x0``."""
        N = self.n_max
        v = self.plateau_value
        rows = [(0.0, 2.0 ** -N, 0.0, v(N))]
        for n in range(N, 2, -1):
            lo, hi = self.plateau(n)
            rows.append((lo, hi, v(n), v(n)))
            if n > 3:
                rows.append((hi, 2.0 ** -(n - 1), v(n), v(n - 1)))
        rows.append((3.0 / 16.0, 0.5, v(3), 0.125))
        rows.append((0.5, 1.0, 0.125, 0.0))
        return np.array(rows, dtype=float)

    def __call__(self, x):
        x = _check_unit(x)
        seg = self.segments
        idx = np.clip(np.searchsorted(seg[:, 0], x, side="right") - 1, 0, len(seg) - 1)
        x0, x1, y0, y1 = seg[idx].T if np.ndim(x) else seg[idx]
        t = (x - x0) / (x1 - x0)
        out = y0 + (y1 - y0) * smoothstep(t)
        return out if np.ndim(x) else float(out)

    def derivative(self, x):
        x = _check_unit(x)
        seg = self.segments
        idx = np.clip(np.searchsorted(seg[:, 0], x, side="right") - 1, 0, len(seg) - 1)
        x0, x1, y0, y1 = seg[idx].T if np.ndim(x) else seg[idx]
        t = (x - x0) / (x1 - x0)
        out = (y1 - y0) * 6.0 * t * (1.0 - t) / (x1 - x0)
        return out if np.ndim(x) else float(out)


_PROFILES: dict[int, AlphaProfile] = {}


def _profile(n_max: int) -> AlphaProfile:
    prof = _PROFILES.get(n_max)
    if prof is None:
        prof = _PROFILES[n_max] = AlphaProfile(n_max)
    return prof


def alpha(x, n_max: int = DEFAULT_N_MAX):
    """Displacement of the interval diffeomorphism at ``x``."""
    return _profile(n_max)(x)


def tau(x, n_max: int = DEFAULT_N_MAX):
    """``x + alpha(x)``; fixed exactly at 0 and 1."""
    x = _check_unit(x)
    out = np.minimum(x + _profile(n_max)(x), 1.0)
    return out if np.ndim(out) else float(out)


def beta(x, eps: float = DEFAULT_EPS):
    """Circle-valued vertical drift: identity on ``[0, 7/8]``, zero near 1.

    On ``[7/8, 1 - eps]`` a cubic Hermite bridge climbs from 7/8 to 1 (which
    is 0 on the circle), leaving with slope 1 and arriving with slope 0.
    """
    if not 0.0 < eps < 1.0 / 8.0:
        raise ValueError("eps must lie in (0, 1/8)")
    x = _check_unit(x)
    lo, hi = 7.0 / 8.0, 1.0 - eps
    width = hi - lo
    t = np.clip((x - lo) / width, 0.0, 1.0)
    # Hermite basis: value 7/8 -> 1, slope 1 -> 0
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    bridge = h00 * lo + h10 * width + h01 * 1.0
    out = np.where(x <= lo, x, np.where(x >= hi, 0.0, bridge)) % 1.0
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# symbolic sources
# --------------------------------------------------------------------------


class SymbolSource(Protocol):
    """Anything that can evaluate a bi-infinite 0/1 sequence at positions."""

    def symbols(self, positions) -> np.ndarray: ...


@dataclass(frozen=True)
class Sturmian:
    """Rotation coding: 1 iff ``x0 + k*rho`` mod 1 lies in ``[1 - rho, 1)``."""

    rho: float = GOLDEN
    x0: float = 0.0

    def symbols(self, positions) -> np.ndarray:
        k = np.asarray(positions, dtype=np.int64)
        # k = hi * 2**26 + lo keeps both products small enough to stay accurate
        hi, lo = k >> 26, k & ((1 << 26) - 1)
        coarse = (self.rho * float(1 << 26)) % 1.0
        phase = (self.x0 + (hi * coarse) % 1.0 + (lo * self.rho) % 1.0) % 1.0
        return (phase >= 1.0 - self.rho).astype(np.uint8)


def sturmian_symbol(rho: float, x0: float, k: int) -> int:
    """Single symbol of the rotation coding."""
    return int(Sturmian(rho, x0).symbols(np.array([k]))[0])


# --------------------------------------------------------------------------
# systems
# --------------------------------------------------------------------------


class System:
    """Base class; subclasses define ``step`` and the coordinate layout."""

    name = "system"
    kind = "continuous"
    # True per coordinate that lives on the circle R/Z
    circle_mask: tuple[bool, ...] = ()
    # f(p) - f(q) depends only on p - q (group endomorphism or rotation)
    translation_invariant = False

    @property
    def dim(self) -> int:
        return len(self.circle_mask)

    def validate(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 0:
            X = X.reshape(1)
        if X.shape[-1] != self.dim:
            raise KindMismatchError(
                f"{self.name} points have {self.dim} coordinate(s), got shape {X.shape}"
            )
        if np.any(~np.isfinite(X)):
            raise DomainError("non-finite coordinate")
        for c, is_circle in enumerate(self.circle_mask):
            col = X[..., c]
            if is_circle:
                if np.any(col < 0.0) or np.any(col >= 1.0):
                    X = X.copy()
                    X[..., c] = col % 1.0
            elif np.any(col < 0.0) or np.any(col > 1.0):
                raise DomainError("interval coordinate outside [0, 1]")
        return X

    def step(self, X) -> np.ndarray:
        raise NotImplementedError

    def orbit(self, X, n: int) -> np.ndarray:
        """States ``X, f(X), ..., f^n(X)`` stacked along a new leading axis."""
        if n < 0:
            raise ValueError("n must be non-negative")
        X = self.validate(X)
        out = np.empty((n + 1,) + X.shape)
        out[0] = X
        for i in range(n):
            out[i + 1] = X = self.step(X)
        return out

    def iter_orbit(self, X, n: int, chunk: int = 1024):
        """Yield ``(t0, states)`` blocks covering times ``0 .. n-1``."""
        X = self.validate(X)
        t = 0
        while t < n:
            size = min(chunk, n - t)
            block = np.empty((size,) + X.shape)
            for i in range(size):
                block[i] = X
                X = self.step(X)
            yield t, block
            t += size

    def base_distance(self, P, Q) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        if P.shape[-1] != self.dim or Q.shape[-1] != self.dim:
            raise KindMismatchError("point dimension does not match the system")
        parts = []
        for c, is_circle in enumerate(self.circle_mask):
            if is_circle:
                parts.append(circle_distance(P[..., c], Q[..., c]))
            else:
                parts.append(np.abs(P[..., c] - Q[..., c]))
        out = np.max(np.stack(parts, axis=-1), axis=-1)
        return out if np.ndim(out) else float(out)

    def difference_orbit(self, V, n: int, t0: int = 0) -> np.ndarray:
        """Differences ``f^k(p) - f^k(q)`` for ``k = t0 .. t0+n-1`` given ``V = p - q``.

        Only available for translation-invariant maps.
        """
        raise NotImplementedError(f"{self.name} is not translation invariant")

    def describe(self) -> str:
        return self.name


@dataclass(frozen=True)
class CircleRotation(System):
    rho: float = GOLDEN

    name = "rotation"
    circle_mask = (True,)
    translation_invariant = True

    def step(self, X):
        return (np.asarray(X, dtype=float) + self.rho) % 1.0

    def difference_orbit(self, V, n, t0=0):
        V = np.asarray(V, dtype=float)
        return np.broadcast_to(V, (n,) + V.shape)

    def describe(self):
        return f"rotation(rho={self.rho!r})"


@dataclass(frozen=True)
class TorusSkew(System):
    """``(x, y) -> (x, x + y)`` on the two-torus."""

    name = "torus"
    circle_mask = (True, True)
    translation_invariant = True

    def step(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty_like(X)
        out[..., 0] = X[..., 0]
        out[..., 1] = (X[..., 0] + X[..., 1]) % 1.0
        return out

    def difference_orbit(self, V, n, t0=0):
        V = np.asarray(V, dtype=float)
        k = np.arange(t0, t0 + n, dtype=float).reshape((n,) + (1,) * (V.ndim - 1))
        out = np.empty((n,) + V.shape)
        out[..., 0] = V[..., 0]
        out[..., 1] = (V[..., 1] + k * V[..., 0]) % 1.0
        return out

    def describe(self):
        return "torus"


@dataclass(frozen=True)
class SkewProduct(System):
    """``(x, y) -> (tau(x), y + beta(x) + rho)`` on ``[0, 1] x T``."""

    rho: float = GOLDEN
    eps: float = DEFAULT_EPS
    n_max: int = DEFAULT_N_MAX

    name = "skew"
    circle_mask = (False, True)

    def __post_init__(self):
        if self.n_max < 3:
            raise ValueError("n_max must be at least 3")
        if not 0.0 < self.eps <= 1.0 / 8.0:
            raise ValueError("eps must lie in (0, 1/8]")

    def step(self, X):
        X = np.asarray(X, dtype=float)
        x = X[..., 0]
        out = np.empty_like(X)
        out[..., 0] = tau(x, self.n_max)
        out[..., 1] = (X[..., 1] + beta(x, self.eps) + self.rho) % 1.0
        return out

    def describe(self):
        return f"skew(rho={self.rho!r}, eps={self.eps!r}, n_max={self.n_max})"


@dataclass(frozen=True)
class ShiftSystem(System):
    """Left shift on the orbit closure of a 0/1 sequence.

    Points are integer offsets ``m`` standing for ``sigma^m(omega)``.  The
    base metric ``sum 2**-|k|`` over mismatches is truncated at ``|k| <= K``;
    the neglected tail is below ``2**-(K-1)``.
    """

    source: SymbolSource = field(default=None)
    radius: int = DEFAULT_RADIUS

    name = "shift"
    kind = "symbolic"

    def __post_init__(self):
        if self.source is None:
            raise ValueError("a symbol source is required")
        if not 8 <= self.radius <= 52:
            raise ValueError("truncation radius must lie in [8, 52]")

    @property
    def dim(self) -> int:
        return 0

    @cached_property
    def kernel(self) -> np.ndarray:
        """Weights ``2**-|k|`` for ``k = -K .. K``."""
        k = np.arange(-self.radius, self.radius + 1)
        return 2.0 ** -np.abs(k)

    def validate(self, X):
        X = np.asarray(X)
        if X.dtype.kind not in "iu":
            if X.dtype.kind == "f" and np.all(X == np.round(X)):
                X = X.astype(np.int64)
            else:
                raise KindMismatchError("shift points are integer offsets")
        return X.astype(np.int64)

    def step(self, X):
        return self.validate(X) + 1

    def orbit(self, X, n):
        X = self.validate(X)
        return X[None, ...] + np.arange(n + 1).reshape((n + 1,) + (1,) * X.ndim)

    def words(self, offsets, lo: int, hi: int) -> np.ndarray:
        """Symbols at ``m + j`` for ``j`` in ``[lo, hi]``, one row per offset."""
        m = self.validate(offsets).reshape(-1)
        j = np.arange(lo, hi + 1, dtype=np.int64)
        return self.source.symbols(m[:, None] + j[None, :])

    def base_distance(self, P, Q):
        P = self.validate(P)
        Q = self.validate(Q)
        K = self.radius
        P, Q = np.broadcast_arrays(P, Q)
        wp = self.words(P, -K, K)
        wq = self.words(Q, -K, K)
        out = (wp != wq) @ self.kernel
        out = out.reshape(P.shape)
        return out if np.ndim(out) else float(out)

    def describe(self):
        src = getattr(self.source, "describe", None)
        label = src() if callable(src) else type(self.source).__name__
        return f"shift({label}, K={self.radius})"


# --------------------------------------------------------------------------
# functional front end
# --------------------------------------------------------------------------


def step(system: System, p):
    return system.step(system.validate(p))


def orbit(system: System, p, n: int):
    return system.orbit(p, n)


def base_distance(system: System, p, q):
    if system.kind == "symbolic":
        return system.base_distance(p, q)
    return system.base_distance(system.validate(p), system.validate(q))


def make_system(name: str, **params) -> System:
    """Build a system from a short name used by the CLI and config files."""
    name = name.lower()
    if name in ("rotation", "circle"):
        return CircleRotation(rho=params.get("rho", GOLDEN))
    if name == "torus":
        return TorusSkew()
    if name == "skew":
        return SkewProduct(
            rho=params.get("rho", GOLDEN),
            eps=params.get("eps", DEFAULT_EPS),
            n_max=params.get("n_max", DEFAULT_N_MAX),
        )
    if name in ("toeplitz", "regular-toeplitz", "sturmian"):
        from .toeplitz import RegularToeplitz, ToeplitzSpec

        if name == "toeplitz":
            source = params.get("spec") or ToeplitzSpec()
        elif name == "regular-toeplitz":
            source = RegularToeplitz()
        else:
            source = Sturmian(params.get("rho", GOLDEN), params.get("x0", 0.0))
        return ShiftSystem(source, radius=params.get("radius", DEFAULT_RADIUS))
    raise ValueError(f"unknown system {name!r}")
