"""Piecewise-linear periodic generators and their multivariate dilations.

The two generators are the periodic triangle waves

    C(t) = 4 |frac(t) - 1/2| - 1,      S(t) = C(t + 3/4),

which agree with cos(2 pi t) and sin(2 pi t) at the quarter integers. For an
integer frequency vector ``k`` the basis functions are ``C_k(x) = C(k . x)``
and ``S_k(x) = S(k . x)``; together with the constant function they form a
Riesz basis of L2([0, 1]^d) when ``k`` runs over the half lattice.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Kind",
    "MultiIndex",
    "BasisId",
    "eval_scalar",
    "eval_basis",
    "eval_basis_batch",
    "is_positive_leading",
    "basis_l2_norm",
    "tri_cos",
    "tri_sin",
]

# dot products in higher dimension are accumulated with fsum
_COMPENSATED_DIM = 8


class Kind(str, enum.Enum):
    CONST = "const"
    COS = "cos"
    SIN = "sin"


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Integer frequency vector ``k`` in Z^d."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if len(entries) < 1:
            raise ValueError("MultiIndex needs at least one entry")
        for e in entries:
            if not -(2**63) <= e < 2**63:
                raise OverflowError(f"entry {e} does not fit in int64")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, *entries: int) -> "MultiIndex":
        if len(entries) == 1 and not isinstance(entries[0], (int, np.integer)):
            return cls(tuple(entries[0]))
        return cls(tuple(entries))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def norm1(self) -> int:
        return sum(abs(e) for e in self.entries)

    def norm2_sq(self) -> int:
        return sum(e * e for e in self.entries)

    def norm2(self) -> float:
        return math.sqrt(self.norm2_sq())

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def __neg__(self) -> "MultiIndex":
        return MultiIndex(tuple(-e for e in self.entries))

    def scaled(self, q: int) -> "MultiIndex":
        return MultiIndex(tuple(q * e for e in self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"MultiIndex{self.entries}"


def _as_index(k) -> MultiIndex:
    if isinstance(k, MultiIndex):
        return k
    return MultiIndex(tuple(k))


@dataclass(frozen=True)
class BasisId:
    """One element of the Riesz system: the constant, ``C_k`` or ``S_k``."""

    kind: Kind
    index: MultiIndex | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.CONST:
            if self.index is not None and not isinstance(self.index, MultiIndex):
                object.__setattr__(self, "index", _as_index(self.index))
            return
        if self.index is None:
            raise ValueError(f"{kind.value} basis function needs an index")
        index = _as_index(self.index)
        if not is_positive_leading(index):
            raise ValueError(f"index {index.entries} is not in the half lattice (k |> 0)")
        object.__setattr__(self, "index", index)

    @classmethod
    def const(cls, dim: int | None = None) -> "BasisId":
        # dimension of the constant is carried only to make mismatches detectable
        return cls(Kind.CONST, None if dim is None else MultiIndex((0,) * dim))

    @classmethod
    def cos(cls, *k) -> "BasisId":
        return cls(Kind.COS, MultiIndex.of(*k))

    @classmethod
    def sin(cls, *k) -> "BasisId":
        return cls(Kind.SIN, MultiIndex.of(*k))

    @property
    def dim(self) -> int | None:
        return None if self.index is None else self.index.dim

    def sort_key(self):
        order = {Kind.CONST: 0, Kind.COS: 1, Kind.SIN: 2}
        entries = () if self.kind is Kind.CONST or self.index is None else self.index.entries
        return (0 if self.kind is Kind.CONST else 1, entries, order[self.kind])

    def __repr__(self):
        if self.kind is Kind.CONST:
            return "BasisId(const)"
        return f"BasisId({self.kind.value}, {self.index.entries})"


def tri_cos(t):
    """Vectorised ``C``: periodic triangle wave with ``C(0) = 1``."""
    t = np.asarray(t, dtype=float)
    return 4.0 * np.abs(t - np.floor(t) - 0.5) - 1.0


def tri_sin(t):
    """Vectorised ``S(t) = C(t + 3/4)``."""
    return tri_cos(np.asarray(t, dtype=float) + 0.75)


def eval_scalar(kind: Kind | str, t: float) -> float:
    """Evaluate ``C`` or ``S`` at a real number ``t``."""
    kind = Kind(kind)
    if not math.isfinite(t):
        raise ValueError(f"cannot evaluate the generator at non-finite t={t!r}")
    if kind is Kind.SIN:
        t = t + 0.75
    elif kind is not Kind.COS:
        raise ValueError("eval_scalar takes cos or sin")
    frac = t - math.floor(t)
    return 4.0 * abs(frac - 0.5) - 1.0


def _dot(k: Sequence[int], x: Sequence[float]) -> float:
    if len(k) > _COMPENSATED_DIM:
        return math.fsum(ki * xi for ki, xi in zip(k, x))
    acc = 0.0
    for ki, xi in zip(k, x):
        acc += ki * xi
    return acc


def eval_basis(basis_id: BasisId, x: Sequence[float]) -> float:
    """Evaluate one element of the Riesz system at the point ``x``."""
    if basis_id.kind is Kind.CONST:
        if basis_id.index is not None and len(x) != basis_id.index.dim:
            raise ValueError(f"point has dimension {len(x)}, expected {basis_id.index.dim}")
        return 1.0
    k = basis_id.index.entries
    if len(x) != len(k):
        raise ValueError(f"point has dimension {len(x)}, index has dimension {len(k)}")
    return eval_scalar(basis_id.kind, _dot(k, x))


def eval_basis_batch(ids: Iterable[BasisId], points) -> np.ndarray:
    """Evaluate many basis functions at many points.

    Returns an array of shape ``(n_points, n_ids)``.
    """
    ids = list(ids)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty((pts.shape[0], len(ids)))
    if not ids:
        return out
    d = pts.shape[1]
    K = np.zeros((len(ids), d))
    sin_mask = np.zeros(len(ids), dtype=bool)
    const_mask = np.zeros(len(ids), dtype=bool)
    for j, b in enumerate(ids):
        if b.kind is Kind.CONST:
            const_mask[j] = True
            continue
        if b.index.dim != d:
            raise ValueError(f"{b!r} does not match point dimension {d}")
        K[j] = b.index.entries
        sin_mask[j] = b.kind is Kind.SIN
    t = pts @ K.T
    t[:, sin_mask] += 0.75
    out[:] = tri_cos(t)
    out[:, const_mask] = 1.0
    return out


def is_positive_leading(k) -> bool:
    """True iff ``k`` is nonzero and its first nonzero entry is positive."""
    entries = k.entries if isinstance(k, MultiIndex) else tuple(k)
    for e in entries:
        if e != 0:
            return e > 0
    return False


def basis_l2_norm(basis_id: BasisId) -> float:
    if basis_id.kind is Kind.CONST:
        return 1.0
    return 1.0 / math.sqrt(3.0)
