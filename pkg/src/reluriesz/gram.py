"""Exact L2 inner products of the piecewise-linear system.

Expanding both generators in their odd harmonics, ``C_k`` and ``C_k'`` can only
interact when ``k = m e`` and ``k' = m' e`` for a common primitive direction
``e``. With ``g = gcd(m, m')``, ``a = m/g`` and ``b = m'/g`` the matching
harmonics are ``p = b j``, ``p' = a j`` for odd ``j``; they exist iff ``a`` and
``b`` are both odd, and summing ``j^-4`` over odd ``j`` leaves

    <C_k, C_k'> = 1 / (3 a^2 b^2),    <S_k, S_k'> = chi(a) chi(b) / (3 a^2 b^2),

where ``chi(n) = (-1)^((n-1)/2)``. Cosine and sine parts are orthogonal.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .basis import BasisId, Kind
from .coeffs import FourierCoeffs, RieszCoeffs

__all__ = [
    "GramMatrix",
    "gram_entry",
    "gram_matrix",
    "l2_inner",
    "l2_norm",
    "fourier_l2_norm",
    "fourier_riesz_inner",
    "l2_distance",
]


def _chi(n: int) -> int:
    return 1 if n % 4 == 1 else -1


def _split(k: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """``k = m e`` with ``e`` primitive; ``e |> 0`` whenever ``k |> 0``."""
    m = math.gcd(*k)
    return tuple(e // m for e in k), m


def _pair_value(kind: Kind, m1: int, m2: int) -> float:
    g = math.gcd(m1, m2)
    a, b = m1 // g, m2 // g
    if a % 2 == 0 or b % 2 == 0:
        return 0.0
    v = 1.0 / (3.0 * a * a * b * b)
    return v if kind is Kind.COS or _chi(a) == _chi(b) else -v


def gram_entry(id1: BasisId, id2: BasisId) -> float:
    """``<id1, id2>`` in L2([0, 1]^d), closed form."""
    if id1.dim is not None and id2.dim is not None and id1.dim != id2.dim:
        raise ValueError(f"dimension mismatch: {id1.dim} vs {id2.dim}")
    c1, c2 = id1.kind is Kind.CONST, id2.kind is Kind.CONST
    if c1 or c2:
        return 1.0 if c1 and c2 else 0.0
    if id1.kind is not id2.kind:
        return 0.0
    e1, m1 = _split(id1.index.entries)
    e2, m2 = _split(id2.index.entries)
    if e1 != e2:
        return 0.0
    return _pair_value(id1.kind, m1, m2)


@dataclass(frozen=True)
class GramMatrix:
    ids: tuple[BasisId, ...]
    entries: np.ndarray

    def normalized(self) -> "GramMatrix":
        """Gram matrix of the unit-norm system (each function divided by its norm)."""
        scale = 1.0 / np.sqrt(np.diag(self.entries))
        return GramMatrix(self.ids, self.entries * np.outer(scale, scale))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def gram_matrix(ids) -> GramMatrix:
    """Gram matrix of a list of distinct basis ids.

    Only ids sharing a kind and a primitive direction interact, so the matrix is
    assembled block by block.
    """
    ids = tuple(ids)
    if len(set(ids)) != len(ids):
        raise ValueError("gram_matrix needs distinct basis ids")
    dims = {b.dim for b in ids if b.dim is not None}
    if len(dims) > 1:
        raise ValueError(f"mixed dimensions {sorted(dims)}")
    G = np.zeros((len(ids), len(ids)))
    groups: dict[tuple, list[tuple[int, int]]] = defaultdict(list)
    for j, b in enumerate(ids):
        if b.kind is Kind.CONST:
            G[j, j] = 1.0
            continue
        e, m = _split(b.index.entries)
        groups[(b.kind, e)].append((j, m))
    for (kind, _), members in groups.items():
        idx = np.array([j for j, _ in members])
        m = np.array([mm for _, mm in members], dtype=np.int64)
        g = np.gcd.outer(m, m)
        a = m[:, None] // g
        b = m[None, :] // g
        odd = (a % 2 == 1) & (b % 2 == 1)
        val = np.where(odd, 1.0 / (3.0 * (a * a * b * b).astype(float)), 0.0)
        if kind is Kind.SIN:
            chi_a = np.where(a % 4 == 1, 1.0, -1.0)
            chi_b = np.where(b % 4 == 1, 1.0, -1.0)
            val = val * chi_a * chi_b
        G[np.ix_(idx, idx)] = val
    return GramMatrix(ids, G)


def _grouped(c: RieszCoeffs):
    out: dict[tuple[int, ...], list[tuple[int, float, float]]] = defaultdict(list)
    for k, (a, b) in c.items():
        e, m = _split(k)
        out[e].append((m, a, b))
    return out


def _block_form(u_terms, v_terms) -> float:
    mu = np.array([t[0] for t in u_terms], dtype=np.int64)
    mv = np.array([t[0] for t in v_terms], dtype=np.int64)
    g = np.gcd.outer(mu, mv)
    a = mu[:, None] // g
    b = mv[None, :] // g
    odd = (a % 2 == 1) & (b % 2 == 1)
    base = np.where(odd, 1.0 / (3.0 * (a * a * b * b).astype(float)), 0.0)
    sign = np.where(a % 4 == 1, 1.0, -1.0) * np.where(b % 4 == 1, 1.0, -1.0)
    ua = np.array([t[1] for t in u_terms])
    ub = np.array([t[2] for t in u_terms])
    va = np.array([t[1] for t in v_terms])
    vb = np.array([t[2] for t in v_terms])
    return float(ua @ base @ va + ub @ (base * sign) @ vb)


def l2_inner(u: RieszCoeffs, v: RieszCoeffs) -> float:
    """Exact L2 inner product of two Riesz expansions."""
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {v.dim}")
    gu, gv = _grouped(u), _grouped(v)
    parts = [u.alpha0 * v.alpha0]
    for e, terms in gu.items():
        other = gv.get(e)
        if other:
            parts.append(_block_form(terms, other))
    return math.fsum(parts)


def l2_norm(u: RieszCoeffs) -> float:
    return math.sqrt(max(l2_inner(u, u), 0.0))


def fourier_l2_norm(f: FourierCoeffs) -> float:
    _, b, bp = f.arrays()
    return math.sqrt(f.a0**2 + math.fsum((b * b + bp * bp) / 2))


def fourier_riesz_inner(f: FourierCoeffs, g: RieszCoeffs) -> float:
    """Exact ``<f, g>`` for a trigonometric polynomial ``f``.

    ``<cos(2 pi m.x), C_k> = 4 / (pi^2 p^2)`` when ``m = p k`` with ``p`` odd,
    and likewise for sine with the extra sign ``chi(p)``.
    """
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
    parts = [f.a0 * g.alpha0]
    by_dir: dict[tuple[int, ...], dict[int, tuple[float, float]]] = defaultdict(dict)
    for m, pair in f.items():
        e, mm = _split(m)
        by_dir[e][mm] = pair
    for k, (alpha, beta) in g.items():
        e, mk = _split(k)
        modes = by_dir.get(e)
        if not modes:
            continue
        for mm, (b, bp) in modes.items():
            if mm % mk:
                continue
            p = mm // mk
            if p % 2 == 0:
                continue
            w = 4.0 / (math.pi**2 * p * p)
            parts.append(w * (b * alpha + _chi(p) * bp * beta))
    return math.fsum(parts)


def l2_distance(f: FourierCoeffs | RieszCoeffs, g: RieszCoeffs) -> float:
    """Exact ``||f - g||_{L2}`` for a finite Fourier or Riesz expansion ``f``."""
    if isinstance(f, RieszCoeffs):
        diff = RieszCoeffs(f.dim, f.alpha0 - g.alpha0,
                           list(f.terms.items()) + [(k, (-a, -b)) for k, (a, b) in g.terms.items()])
        return l2_norm(diff)
    sq = fourier_l2_norm(f) ** 2 - 2 * fourier_riesz_inner(f, g) + l2_inner(g, g)
    return math.sqrt(max(sq, 0.0))
