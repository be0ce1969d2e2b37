"""Integer lattice points in Euclidean balls.

Everything here works with the squared radius as an exact rational number so
that boundary points such as ``(1, 1)`` at radius ``sqrt(2)`` are classified
without floating point error. Two independent counting routes are provided:
a theta-series convolution (:func:`count_ball`) and the slicing recursion over
the first coordinate (:func:`count_ball_recursive`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _constants

__all__ = [
    "BallSpec",
    "LatticeConfig",
    "DEFAULT_CONFIG",
    "CapExceededError",
    "enumerate_ball",
    "enumerate_half_ball",
    "half_lattice_mask",
    "count_ball",
    "count_ball_recursive",
    "upper_bound_N",
    "log_upper_bound_N",
    "bound_terms",
    "weight_rearrangement",
    "weight_partial_sum",
    "lower_bound_W",
]


class CapExceededError(ValueError):
    """Requested enumeration is larger than the configured cap."""


@dataclass(frozen=True)
class LatticeConfig:
    c1: float = _constants.C1
    c2: float = _constants.C2
    cap: int = 10**7


DEFAULT_CONFIG = LatticeConfig()


@dataclass(frozen=True)
class BallSpec:
    """Ball of squared radius ``t2`` (exact rational) in dimension ``dim``."""

    t2: Fraction
    dim: int

    def __post_init__(self):
        t2 = Fraction(self.t2)
        if t2 < 0:
            raise ValueError("squared radius must be nonnegative")
        if int(self.dim) < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "t2", t2)
        object.__setattr__(self, "dim", int(self.dim))

    @classmethod
    def from_radius(cls, t: float, dim: int) -> "BallSpec":
        """Radius given as a number; its square is taken exactly."""
        if isinstance(t, float) and not math.isfinite(t):
            raise ValueError("radius must be finite")
        if t < 0:
            raise ValueError("radius must be nonnegative")
        return cls(Fraction(t) ** 2, dim)

    @classmethod
    def from_squared(cls, t2, dim: int) -> "BallSpec":
        return cls(Fraction(t2), dim)

    @property
    def radius(self) -> float:
        return math.sqrt(self.t2)

    @property
    def t2_floor(self) -> int:
        """Largest integer squared norm inside the ball."""
        return math.floor(self.t2)


def _spec(spec_or_t, dim=None) -> BallSpec:
    if isinstance(spec_or_t, BallSpec):
        return spec_or_t
    return BallSpec.from_radius(spec_or_t, dim)


def _enumerate_sq(T: int, d: int) -> np.ndarray:
    """All k in Z^d with |k|^2 <= T, lexicographic order."""
    prefix = np.zeros((1, 0), dtype=np.int64)
    rem = np.array([T], dtype=np.int64)
    for _ in range(d):
        r = math.isqrt(int(rem.max()))
        js = np.arange(-r, r + 1, dtype=np.int64)
        m = prefix.shape[0]
        rep = np.repeat(np.arange(m), js.size)
        jj = np.tile(js, m)
        new_rem = rem[rep] - jj * jj
        keep = new_rem >= 0
        prefix = np.column_stack([prefix[rep[keep]], jj[keep]])
        rem = new_rem[keep]
    return prefix


def half_lattice_mask(points: np.ndarray) -> np.ndarray:
    """Row mask of ``k |> 0`` (first nonzero entry positive)."""
    points = np.asarray(points)
    nz = points != 0
    has = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    lead = points[np.arange(points.shape[0]), first]
    return has & (lead > 0)


def _check_cap(spec: BallSpec, cap: int, config: LatticeConfig):
    n = count_ball(spec)
    if n > cap:
        bound = upper_bound_N(spec, config) if spec.t2 > 0 else 1.0
        raise CapExceededError(
            f"N(t={spec.radius:.6g}, d={spec.dim}) = {n} exceeds the cap {cap} "
            f"(lattice bound {bound:.3e})"
        )


def enumerate_ball(spec: BallSpec, *, cap: int | None = None,
                   config: LatticeConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Integer points of the ball as an ``(N, d)`` int64 array, lexicographic."""
    cap = config.cap if cap is None else cap
    _check_cap(spec, cap, config)
    return _enumerate_sq(spec.t2_floor, spec.dim)


def enumerate_half_ball(spec: BallSpec, *, cap: int | None = None,
                        config: LatticeConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Points ``k |> 0`` of the ball, lexicographic; ``(N(t, d) - 1) / 2`` rows."""
    pts = enumerate_ball(spec, cap=cap, config=config)
    return pts[half_lattice_mask(pts)]


def _theta_counts(T: int, d: int) -> np.ndarray:
    """r_d(n) for n = 0..T: number of representations as a sum of d squares."""
    # int64 suffices unless the total can exceed ~9e18
    big = d * math.log(2 * math.isqrt(T) + 1) > 43
    dtype = object if big else np.int64
    r = np.zeros(T + 1, dtype=dtype)
    r[0] = 1
    roots = math.isqrt(T)
    for _ in range(d):
        new = r.copy()
        for j in range(1, roots + 1):
            sq = j * j
            new[sq:] += 2 * r[: T + 1 - sq]
        r = new
    return r


def count_ball(spec: BallSpec) -> int:
    """N(t, d) from the theta series; never materialises points."""
    return int(sum(_theta_counts(spec.t2_floor, spec.dim)))


@functools.lru_cache(maxsize=None)
def _count_rec(T: int, d: int) -> int:
    if d == 1:
        return 2 * math.isqrt(T) + 1
    r = math.isqrt(T)
    total = _count_rec(T, d - 1)
    for j in range(1, r + 1):
        total += 2 * _count_rec(T - j * j, d - 1)
    return total


def count_ball_recursive(spec: BallSpec) -> int:
    """N(t, d) by slicing along the first coordinate, memoised on (floor t^2, d)."""
    T, d = spec.t2_floor, spec.dim
    # fill the table bottom-up in d so deep dimensions do not hit the recursion limit
    for dd in range(1, d):
        for TT in range(T + 1):
            _count_rec(TT, dd)
    return _count_rec(T, d)


def bound_terms(spec: BallSpec, config: LatticeConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Log of both lattice bounds, ``((c1 t/sqrt d)^d, (c2 d/t^2)^(t^2))``."""
    t2 = float(spec.t2)
    d = spec.dim
    if t2 <= 0:
        raise ValueError("the lattice bounds need t > 0")
    log_i = d * (math.log(config.c1) + 0.5 * math.log(t2) - 0.5 * math.log(d))
    log_ii = t2 * (math.log(config.c2 * d) - math.log(t2))
    return log_i, log_ii


def log_upper_bound_N(spec: BallSpec, config: LatticeConfig = DEFAULT_CONFIG) -> float:
    log_i, log_ii = bound_terms(spec, config)
    # regime (i) iff t >= sqrt(d)/2, compared exactly as 4 t^2 >= d
    return log_i if 4 * spec.t2 >= spec.dim else log_ii


def upper_bound_N(spec: BallSpec, config: LatticeConfig = DEFAULT_CONFIG) -> float:
    log_b = log_upper_bound_N(spec, config)
    return math.inf if log_b > 709 else math.exp(log_b)


def _half_count(T: int, d: int) -> int:
    return (int(sum(_theta_counts(T, d))) - 1) // 2


def weight_rearrangement(n: int, d: int, s: float, *, cap: int = 10**7):
    """The ``n`` smallest weights ``|k|_2^s`` over the half lattice.

    Returns ``(weights, indices)``; weights are nondecreasing and ties are
    broken by the lexicographic order of ``k``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if s < 0:
        raise ValueError("s must be nonnegative")
    if n > cap:
        raise CapExceededError(f"n = {n} exceeds the cap {cap}")
    # smallest squared radius whose half ball holds n points
    hi = 1
    while _half_count(hi, d) < n:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _half_count(mid, d) >= n:
            hi = mid
        else:
            lo = mid
    pts = _enumerate_sq(hi, d)
    pts = pts[half_lattice_mask(pts)]
    sq = (pts * pts).sum(axis=1)
    order = np.argsort(sq, kind="stable")[:n]
    idx = pts[order]
    weights = np.sqrt(sq[order].astype(float)) ** s
    return weights, idx


def weight_partial_sum(ell: int, d: int, s: float) -> float:
    """Sum of the ``ell`` smallest half-lattice weights."""
    w, _ = weight_rearrangement(ell, d, s)
    return math.fsum(w)


def lower_bound_W(ell: int, d: int, s: float, *, c: float | None = None,
                  config: LatticeConfig = DEFAULT_CONFIG) -> float:
    """Piecewise lower bound for the weight partial sums.

    Every regime whose range contains ``ell`` is evaluated and the largest
    value returned; for small ``d`` the ranges overlap.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    c1, c2 = config.c1, config.c2
    if c is None:
        c = _constants.w_lower_constant(s)
    c2d = c2 * d
    top = (c1 / 2) ** d
    values = []
    if ell <= c2d:
        values.append(float(ell))
    if c2d < ell <= top:
        values.append((1 - s / 2) * ell * (math.log(ell) / math.log(c2d)) ** (s / 2))
    if ell >= top:
        values.append(c * d ** (s / 2) * ell ** (s / d + 1))
    return max(values)
