"""Sparse coefficient containers and their JSON interchange format.

Both containers live on the half lattice ``k |> 0``. A Fourier expansion is
stored in real form

    f(x) = a0 + sum_m  b_m cos(2 pi m.x) + b'_m sin(2 pi m.x),

with ``b_m = a_m + a_{-m}`` and ``b'_m = i (a_m - a_{-m})`` in terms of the
complex coefficients; a Riesz expansion as

    f(x) = alpha0 + sum_k  alpha_k C_k(x) + beta_k S_k(x).

The JSON layout is ``{"dim": d, "a0" | "alpha0": v, "terms": [{"k": [...],
"c": cos_coef, "s": sin_coef}, ...]}`` with terms in lexicographic order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .basis import BasisId, Kind, MultiIndex, is_positive_leading, tri_cos

__all__ = ["FourierCoeffs", "RieszCoeffs", "load_coeffs", "dumps_coeffs", "loads_coeffs"]


def _norm_terms(dim: int, terms) -> dict[tuple[int, ...], tuple[float, float]]:
    out: dict[tuple[int, ...], tuple[float, float]] = {}
    items = terms.items() if isinstance(terms, dict) else terms
    for k, pair in items:
        key = tuple(int(e) for e in (k.entries if isinstance(k, MultiIndex) else k))
        if len(key) != dim:
            raise ValueError(f"index {key} does not have dimension {dim}")
        if not is_positive_leading(key):
            raise ValueError(f"index {key} is not in the half lattice (k |> 0)")
        c, s = (float(pair[0]), float(pair[1]))
        if not (math.isfinite(c) and math.isfinite(s)):
            raise ValueError(f"non-finite coefficient at {key}")
        if key in out:
            c0, s0 = out[key]
            c, s = c0 + c, s0 + s
        out[key] = (c, s)
    return out


@dataclass
class _Coeffs:
    dim: int
    const: float = 0.0
    terms: dict = field(default_factory=dict)

    _const_key = "const"

    def __post_init__(self):
        self.dim = int(self.dim)
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        self.const = float(self.const)
        self.terms = _norm_terms(self.dim, self.terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], tuple[float, float]]]:
        """Terms in lexicographic index order."""
        for k in sorted(self.terms):
            yield k, self.terms[k]

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)

    def nonzero(self):
        """Copy without terms whose two coefficients both vanish."""
        kept = {k: v for k, v in self.terms.items() if v[0] != 0.0 or v[1] != 0.0}
        return type(self)(self.dim, self.const, kept)

    def arrays(self):
        """``(K, c, s)``: index matrix and the cosine/sine coefficient vectors."""
        keys = self.support()
        if not keys:
            return np.zeros((0, self.dim), dtype=np.int64), np.zeros(0), np.zeros(0)
        K = np.array(keys, dtype=np.int64)
        c = np.array([self.terms[k][0] for k in keys])
        s = np.array([self.terms[k][1] for k in keys])
        return K, c, s

    def scaled(self, factor: float):
        return type(self)(self.dim, self.const * factor,
                          {k: (a * factor, b * factor) for k, (a, b) in self.terms.items()})

    def __len__(self):
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            self._const_key: self.const,
            "terms": [{"k": list(k), "c": c, "s": s} for k, (c, s) in self.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict):
        if not isinstance(doc, dict):
            raise ValueError("malformed coefficient document: expected an object")
        extra = set(doc) - {"dim", cls._const_key, "terms"}
        if extra:
            raise ValueError(f"malformed coefficient document: unknown field(s) {sorted(extra)}")
        for i, t in enumerate(doc.get("terms", [])):
            bad = set(t) - {"k", "c", "s"} if isinstance(t, dict) else {"<not an object>"}
            if bad:
                raise ValueError(f"malformed coefficient document: terms[{i}] has unknown field(s) {sorted(bad)}")
        try:
            dim = doc["dim"]
            const = doc.get(cls._const_key, 0.0)
            terms = [(t["k"], (t.get("c", 0.0), t.get("s", 0.0))) for t in doc.get("terms", [])]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed coefficient document: {exc}") from exc
        return cls(dim, const, terms)

    def __eq__(self, other):
        return (type(self) is type(other) and self.dim == other.dim
                and self.const == other.const and self.terms == other.terms)


class FourierCoeffs(_Coeffs):
    """Real trigonometric coefficients ``a0, (b_m, b'_m)`` on the half lattice."""

    _const_key = "a0"

    def __init__(self, dim: int, a0: float = 0.0, terms=None):
        super().__init__(dim, a0, terms or {})

    @property
    def a0(self) -> float:
        return self.const

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        K, b, bp = self.arrays()
        phase = 2 * np.pi * (pts @ K.T)
        return self.a0 + np.cos(phase) @ b + np.sin(phase) @ bp

    def __repr__(self):
        return f"FourierCoeffs(dim={self.dim}, a0={self.a0!r}, n_terms={len(self)})"


class RieszCoeffs(_Coeffs):
    """Coefficients ``alpha0, (alpha_k, beta_k)`` of the piecewise-linear Riesz basis."""

    _const_key = "alpha0"

    def __init__(self, dim: int, alpha0: float = 0.0, terms=None):
        super().__init__(dim, alpha0, terms or {})

    @property
    def alpha0(self) -> float:
        return self.const

    def evaluate(self, points) -> np.ndarray:
        """Direct coefficient sum at an ``(n, d)`` array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        K, a, b = self.arrays()
        t = pts @ K.T
        return self.alpha0 + tri_cos(t) @ a + tri_cos(t + 0.75) @ b

    def basis_ids(self, include_const: bool = True) -> list[BasisId]:
        ids = [BasisId(Kind.CONST)] if include_const else []
        for k in self.support():
            idx = MultiIndex(k)
            ids.append(BasisId(Kind.COS, idx))
            ids.append(BasisId(Kind.SIN, idx))
        return ids

    @classmethod
    def from_vector(cls, dim: int, ids, values) -> "RieszCoeffs":
        """Assemble from a coefficient vector aligned with a list of basis ids."""
        alpha0 = 0.0
        terms: dict[tuple[int, ...], list[float]] = {}
        for b, v in zip(ids, values):
            v = float(v)
            if b.kind is Kind.CONST:
                alpha0 += v
                continue
            slot = terms.setdefault(b.index.entries, [0.0, 0.0])
            slot[0 if b.kind is Kind.COS else 1] += v
        return cls(dim, alpha0, {k: tuple(v) for k, v in terms.items()})

    def to_vector(self, ids) -> np.ndarray:
        out = np.zeros(len(ids))
        for j, b in enumerate(ids):
            if b.kind is Kind.CONST:
                out[j] = self.alpha0
            else:
                pair = self.terms.get(b.index.entries)
                if pair is not None:
                    out[j] = pair[0] if b.kind is Kind.COS else pair[1]
        return out

    def __repr__(self):
        return f"RieszCoeffs(dim={self.dim}, alpha0={self.alpha0!r}, n_terms={len(self)})"


def loads_coeffs(text: str) -> FourierCoeffs | RieszCoeffs:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("coefficient document must be a JSON object")
    if "alpha0" in doc:
        return RieszCoeffs.from_dict(doc)
    if "a0" in doc:
        return FourierCoeffs.from_dict(doc)
    raise ValueError("coefficient document needs an 'a0' (Fourier) or 'alpha0' (Riesz) field")


def dumps_coeffs(c: FourierCoeffs | RieszCoeffs) -> str:
    return json.dumps(c.to_dict(), indent=1)


def load_coeffs(path) -> FourierCoeffs | RieszCoeffs:
    with open(path) as fh:
        return loads_coeffs(fh.read())
