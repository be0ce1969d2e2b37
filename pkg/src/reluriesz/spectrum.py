"""Change of basis between trigonometric and piecewise-linear expansions.

The triangle waves have the odd-harmonic expansions

    C(t) = (8/pi^2) sum_{p odd} p^-2 cos(2 pi p t),
    S(t) = (8/pi^2) sum_{p odd} (-1)^((p-1)/2) p^-2 sin(2 pi p t),

and Moebius inversion over the odd integers turns them around:

    cos(2 pi t) = (pi^2/8) sum_{q odd} mu(q) q^-2 C(q t),
    sin(2 pi t) = (pi^2/8) sum_{q odd} (-1)^((q-1)/2) mu(q) q^-2 S(q t).

Both directions are applied mode by mode to multivariate expansions since
``C_k(x) = C(k.x)``.
"""

from __future__ import annotations

import enum
import functools
import math
from fractions import Fraction

import numpy as np

from . import _constants
from .coeffs import FourierCoeffs, RieszCoeffs
from .lattice import BallSpec, enumerate_half_ball

__all__ = [
    "Space",
    "mobius",
    "mobius_table",
    "generator_fourier_coefficient",
    "fourier_to_riesz",
    "riesz_arrays",
    "riesz_head",
    "riesz_to_fourier",
    "norm",
    "odd_squarefree_zeta",
    "random_unit_ball",
    "make_rng",
    "RNG_ALGORITHM",
    "DEFAULT_TRUNC_L",
    "DEFAULT_TRUNC_P",
]

DEFAULT_TRUNC_L = 101
# harmonics p <= 203, the same odd range as L = 101 on the other side
DEFAULT_TRUNC_P = 203

RNG_ALGORITHM = "numpy.Philox"


class Space(str, enum.Enum):
    WS = "Ws"        # Sobolev, Fourier coefficients, l2
    FS = "Fs"        # Sobolev analogue, Riesz coefficients, l2
    BS = "Bs"        # Barron, Fourier coefficients, l1
    BS_SEQ = "BsSeq"  # Barron analogue, Riesz coefficients, l1


def make_rng(seed, *stream) -> np.random.Generator:
    """Counter-based generator; ``stream`` derives independent per-task streams."""
    ss = np.random.SeedSequence([int(seed), *[int(x) for x in stream]])
    return np.random.Generator(np.random.Philox(ss))


def mobius(n: int) -> int:
    """Moebius function by trial division."""
    n = int(n)
    if n < 1:
        raise ValueError("the Moebius function is defined for n >= 1")
    if n >= 2**63:
        raise OverflowError("n must fit in a signed 64-bit integer")
    sign = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            sign = -sign
        p += 1 if p == 2 else 2
    if n > 1:
        sign = -sign
    return sign


@functools.lru_cache(maxsize=8)
def mobius_table(n_max: int) -> np.ndarray:
    """mu(0..n_max) by a linear sieve; entry 0 is unused and set to 0."""
    mu = np.zeros(n_max + 1, dtype=np.int8)
    if n_max >= 1:
        mu[1] = 1
    is_comp = np.zeros(n_max + 1, dtype=bool)
    primes: list[int] = []
    for i in range(2, n_max + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > n_max:
                break
            is_comp[ip] = True
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    mu.setflags(write=False)
    return mu


def generator_fourier_coefficient(kind: str, p: int) -> float:
    """Coefficient of ``cos(2 pi p t)`` in C, or of ``sin(2 pi p t)`` in S."""
    if p < 1:
        raise ValueError("harmonic index must be positive")
    if p % 2 == 0:
        return 0.0
    base = 8.0 / (math.pi**2 * p * p)
    kind = str(getattr(kind, "value", kind)).lower()
    if kind == "cos":
        return base
    if kind == "sin":
        return base if (p - 1) // 2 % 2 == 0 else -base
    raise ValueError("kind must be cos or sin")


def _scale(key, q):
    return tuple(q * e for e in key)


def _unique_rows(rows: np.ndarray):
    """``np.unique(rows, axis=0, return_inverse=True)``, faster for small entries."""
    M = int(np.abs(rows).max())
    base = 2 * M + 1
    d = rows.shape[1]
    if d * math.log2(base) < 62:
        # mixed-radix code; integer order equals lexicographic row order
        code = np.zeros(rows.shape[0], dtype=np.int64)
        for i in range(d):
            code = code * base + (rows[:, i] + M)
        _, first, inv = np.unique(code, return_index=True, return_inverse=True)
        return rows[first], inv.reshape(-1)
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    return uniq, inv.reshape(-1)


def riesz_arrays(f: FourierCoeffs, L: int = DEFAULT_TRUNC_L, *, radius: float | None = None):
    """Array form of :func:`fourier_to_riesz`.

    Returns ``(K, alpha, beta, tail_bound)`` with the rows of ``K`` in
    lexicographic order. ``radius`` keeps ``|k|^2 <= floor(radius^2)``.
    """
    if L < 0:
        raise ValueError("L must be nonnegative")
    mu = mobius_table(2 * L + 1)
    K, b, bp = f.arrays()
    mass = math.fsum(np.abs(b)) + math.fsum(np.abs(bp))
    tail = _constants.PI2_OVER_8 * mass / (4 * L + 2)
    T = None if radius is None else math.floor(Fraction(radius) ** 2)
    sq = (K * K).sum(axis=1)
    rows, vc, vs = [], [], []
    for q in range(1, 2 * L + 2, 2):
        if mu[q] == 0:
            continue
        keep = slice(None) if T is None else q * q * sq <= T
        w = _constants.PI2_OVER_8 * int(mu[q]) / (q * q)
        rows.append(q * K[keep])
        vc.append(w * b[keep])
        vs.append((w if q % 4 == 1 else -w) * bp[keep])
    rows = np.concatenate(rows) if rows else np.zeros((0, f.dim), dtype=np.int64)
    if rows.shape[0] == 0:
        return rows, np.zeros(0), np.zeros(0), tail
    uniq, inv = _unique_rows(rows)
    alpha = np.bincount(inv, weights=np.concatenate(vc), minlength=len(uniq))
    beta = np.bincount(inv, weights=np.concatenate(vs), minlength=len(uniq))
    return uniq, alpha, beta, tail


def fourier_to_riesz(f: FourierCoeffs, L: int = DEFAULT_TRUNC_L, *, radius: float | None = None):
    """Riesz coefficients of a trigonometric polynomial.

    Uses the odd multipliers ``q = 2l + 1 <= 2L + 1``. Returns
    ``(coeffs, tail_bound)`` where ``tail_bound`` bounds the l1 mass of the
    dropped Riesz coefficients. With ``radius`` only indices with
    ``|k|_2 <= radius`` are produced.
    """
    K, alpha, beta, tail = riesz_arrays(f, L, radius=radius)
    terms = {tuple(k): (a, b) for k, a, b in zip(K.tolist(), alpha.tolist(), beta.tolist())}
    return RieszCoeffs(f.dim, f.a0, terms), tail


def riesz_head(f: FourierCoeffs, radius: float) -> RieszCoeffs:
    """All Riesz coefficients with ``|k|_2 <= radius``, exactly.

    Only odd multipliers ``q <= radius`` can land inside the ball, so a finite
    truncation reproduces the head without error.
    """
    L = max(0, (math.floor(radius) - 1) // 2)
    head, _ = fourier_to_riesz(f, L, radius=radius)
    return head


def riesz_to_fourier(g: RieszCoeffs, P: int = DEFAULT_TRUNC_P):
    """Trigonometric coefficients of a Riesz expansion, harmonics ``p <= P``.

    Returns ``(coeffs, tail_bound)``; the bound covers the l1 mass of the
    dropped harmonics.
    """
    if P < 1:
        raise ValueError("P must be at least 1")
    acc: dict[tuple[int, ...], list[float]] = {}
    mass = 0.0
    for k, (a, b) in g.items():
        mass += abs(a) + abs(b)
        for p in range(1, P + 1, 2):
            w = 8.0 / (math.pi**2 * p * p)
            slot = acc.setdefault(_scale(k, p), [0.0, 0.0])
            slot[0] += w * a
            slot[1] += (w if (p - 1) // 2 % 2 == 0 else -w) * b
    head = math.fsum(1.0 / (p * p) for p in range(1, P + 1, 2))
    tail_sum = max(_constants.PI2_OVER_8 - head, 0.0)
    tail = mass * 8.0 / math.pi**2 * tail_sum
    return FourierCoeffs(g.dim, g.alpha0, {k: tuple(v) for k, v in acc.items()}), tail


def _weights(keys, s: float) -> np.ndarray:
    sq = np.array([sum(e * e for e in k) for k in keys], dtype=float)
    return np.sqrt(sq) ** s


def norm(space: Space | str, s: float, c: FourierCoeffs | RieszCoeffs) -> float:
    """Sobolev or Barron norm from the coefficients.

    ``Ws``:    sqrt(a0^2 + sum |m|^2s (b^2 + b'^2) / 2)
    ``Bs``:    |a0| + sum |m|^s sqrt(b^2 + b'^2)
    ``Fs``:    sqrt(alpha0^2 + sum |k|^2s (alpha^2 + beta^2))
    ``BsSeq``: |alpha0| + sum |k|^s (|alpha| + |beta|)

    The real-form factors follow from ``|a_m| = |a_-m| = sqrt(b^2 + b'^2) / 2``.
    """
    space = Space(space)
    if space in (Space.WS, Space.BS):
        if not isinstance(c, FourierCoeffs):
            raise TypeError(f"{space.value} norm takes Fourier coefficients")
    elif not isinstance(c, RieszCoeffs):
        raise TypeError(f"{space.value} norm takes Riesz coefficients")
    if space is Space.BS_SEQ:
        if s < 0:
            raise ValueError("s must be nonnegative")
    elif not 0 <= s < 1:
        raise ValueError(f"s={s} outside [0, 1), where the norm equivalences hold")
    keys = c.support()
    _, a, b = c.arrays()
    w = _weights(keys, s)
    if space is Space.WS:
        return math.sqrt(c.const**2 + math.fsum(w * w * (a * a + b * b) / 2))
    if space is Space.FS:
        return math.sqrt(c.const**2 + math.fsum(w * w * (a * a + b * b)))
    if space is Space.BS:
        return abs(c.const) + math.fsum(w * np.hypot(a, b))
    return abs(c.const) + math.fsum(w * (np.abs(a) + np.abs(b)))


def odd_squarefree_zeta(x: float, q_max: int = 10**6) -> float:
    """Upper bound for ``sum_{q odd} |mu(q)| q^-x`` (``x > 1``).

    The partial sum up to ``q_max`` is exact; the remainder is bounded by the
    integral of the sum over all odd ``q``.
    """
    if x <= 1:
        raise ValueError("the series diverges for x <= 1")
    mu = mobius_table(q_max)
    q = np.arange(1, q_max + 1, 2)
    part = math.fsum(np.abs(mu[q]).astype(float) * q.astype(float) ** (-x))
    tail = q_max ** (1 - x) / (2 * (x - 1))
    return part + tail


def random_unit_ball(space: Space | str, dim: int, s: float, support_radius: float,
                     *, sparsity: int | None = None, seed: int = 0, decay: float = 0.0):
    """Random coefficients of unit norm in ``space``.

    Draws iid standard normals on the half ball of radius ``support_radius``
    (both the cosine and the sine slot of every index), optionally keeps a
    random subset of ``sparsity`` slots, multiplies by ``|k|^-decay`` and
    rescales to unit norm. ``Ws``/``Bs`` give Fourier coefficients,
    ``Fs``/``BsSeq`` Riesz coefficients. Deterministic in all arguments.
    """
    space = Space(space)
    if support_radius < 1:
        raise ValueError("support radius must be at least 1")
    K = enumerate_half_ball(BallSpec.from_radius(support_radius, dim))
    if K.shape[0] == 0:
        raise ValueError("empty support")
    rng = make_rng(seed, dim, int(round(1000 * s)), int(round(1000 * support_radius)))
    vals = rng.standard_normal((K.shape[0], 2))
    if sparsity is not None:
        if not 1 <= sparsity <= vals.size:
            raise ValueError(f"sparsity must be in [1, {vals.size}]")
        keep = rng.choice(vals.size, size=sparsity, replace=False)
        mask = np.zeros(vals.size, dtype=bool)
        mask[keep] = True
        vals = np.where(mask.reshape(vals.shape), vals, 0.0)
    if decay:
        vals *= np.sqrt((K * K).sum(axis=1).astype(float))[:, None] ** (-decay)
    terms = {tuple(int(e) for e in k): (float(v[0]), float(v[1]))
             for k, v in zip(K, vals) if v[0] != 0.0 or v[1] != 0.0}
    cls = FourierCoeffs if space in (Space.WS, Space.BS) else RieszCoeffs
    out = cls(dim, 0.0, terms)
    return out.scaled(1.0 / norm(space, s, out))
