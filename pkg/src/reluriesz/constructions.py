"""Exact ReLU realizations of the generators and of finite Riesz sums.

Generator chain
---------------
For an integer ``k`` and a phase ``phi`` put ``lo = sum min(k_i, 0)`` and
``K = |k|_1``. On the unit cube ``k.x`` ranges over ``[lo, lo + K]``, so

    u = (k.x - lo + phi) / n,   n = K (phi = 0) or K + 1 (phi > 0)

lies in ``[0, 1]`` and ``C(k.x + phi) = C(n u)`` because ``lo`` is an integer.
Frequencies are then halved by tents: with ``m = ceil(n/2)``,

    g(u) = (n/m) ReLU(u) - (2n/m) ReLU(u - m/n)

maps ``[0, 1]`` onto ``[0, 1]`` and ``C(n u) = C(m g(u))``. At ``n = 1`` the
wave itself is ``C(u) = -4 ReLU(u) + 8 ReLU(u - 1/2) + 1``. This takes
``ceil(log2 n) + 1`` hidden layers of width 2.

``S(t) = C(t + 3/4)``, and ``a C(t) = -a C(t + 1/2)`` lets every term pick the
sign of its contribution to the output bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisId, Kind, MultiIndex
from .coeffs import RieszCoeffs
from .network import AffineMap, ReluNetwork, nonzero_params, param_count

__all__ = [
    "build_hat",
    "build_generator_net",
    "pad_depth",
    "build_stacked",
    "build_inline",
    "build",
    "audit",
    "stacked_weight_bound",
]

_PHASE = {Kind.COS: 0.0, Kind.SIN: 0.75}


@dataclass(frozen=True)
class _Chain:
    """One width-2 chain computing ``C(k.x + phase)`` on the unit cube."""

    k: tuple[int, ...]
    phase: float
    coef: float

    @property
    def freq(self) -> int:
        K = sum(abs(e) for e in self.k)
        return K if self.phase == 0.0 else K + 1

    def u_form(self) -> tuple[np.ndarray, float]:
        """``u = row . x + bias``."""
        n = self.freq
        lo = sum(min(e, 0) for e in self.k)
        return np.array(self.k, dtype=float) / n, (self.phase - lo) / n

    def steps(self) -> tuple[list[float], list[float]]:
        """Thresholds of every hidden layer and the tent slopes between them."""
        thresholds, slopes = [], []
        n = self.freq
        while n > 1:
            m = (n + 1) // 2
            thresholds.append(m / n)
            slopes.append(n / m)
            n = m
        thresholds.append(0.5)
        return thresholds, slopes

    @property
    def depth(self) -> int:
        return len(self.steps()[0])


def _term_chains(coeffs: RieszCoeffs) -> list[tuple[BasisId, _Chain]]:
    out = []
    for k, (a, b) in coeffs.items():
        for kind, v in ((Kind.COS, a), (Kind.SIN, b)):
            if v != 0.0:
                out.append((BasisId(kind, MultiIndex(k)), _Chain(k, _PHASE[kind], v)))
    return out


def _id_doc(b: BasisId):
    return [b.kind.value, list(b.index.entries)]


def _constant_net(dim: int, value: float, meta: dict) -> ReluNetwork:
    # one dead hidden unit keeps every net in the same layer format
    layers = (AffineMap(np.zeros((1, dim)), np.zeros(1)), AffineMap(np.zeros((1, 1)), np.array([value])))
    return ReluNetwork(dim, layers, meta)


def build_hat() -> ReluNetwork:
    """The hat ``H(x) = 2 ReLU(x) - 4 ReLU(x - 1/2)`` on [0, 1]."""
    layers = (AffineMap([[1.0], [1.0]], [0.0, -0.5]), AffineMap([[2.0, -4.0]], [0.0]))
    return ReluNetwork(1, layers, {"architecture": "atomic", "function": "hat"})


def build_generator_net(kind: Kind | str, k) -> ReluNetwork:
    """Width-2 network equal to ``C(k.x)`` or ``S(k.x)`` on ``[0, 1]^d``."""
    kind = Kind(kind)
    if kind is Kind.CONST:
        raise ValueError("build_generator_net takes cos or sin")
    idx = k if isinstance(k, MultiIndex) else MultiIndex(tuple(k))
    if idx.is_zero():
        raise ValueError("frequency vector must be nonzero")
    chain = _Chain(idx.entries, _PHASE[kind], 1.0)
    row, c = chain.u_form()
    thresholds, slopes = chain.steps()
    layers = [AffineMap(np.vstack([row, row]), [c, c - thresholds[0]])]
    for slope, theta in zip(slopes, thresholds[1:]):
        layers.append(AffineMap([[slope, -2 * slope], [slope, -2 * slope]], [0.0, -theta]))
    layers.append(AffineMap([[-4.0, 8.0]], [1.0]))
    meta = {"architecture": "atomic", "basis_ids": [[kind.value, list(idx.entries)]]}
    return ReluNetwork(idx.dim, tuple(layers), meta)


def pad_depth(net: ReluNetwork, L_target: int) -> ReluNetwork:
    """Deepen ``net`` to ``L_target`` hidden layers without changing it.

    The output ``y`` must stay in ``[-1, 1]`` on the domain; the extra layers
    carry ``ReLU(y + 1)`` and the final map subtracts the shift again.
    """
    if L_target < net.depth:
        raise ValueError(f"cannot pad depth {net.depth} down to {L_target}")
    if L_target == net.depth:
        return net
    last = net.layers[-1]
    layers = list(net.layers[:-1])
    layers.append(AffineMap(last.weights, last.bias + 1.0))
    layers += [AffineMap([[1.0]], [0.0]) for _ in range(L_target - net.depth - 1)]
    layers.append(AffineMap([[1.0]], [-1.0]))
    meta = dict(net.metadata)
    meta["padded_from"] = net.depth
    return ReluNetwork(net.dim_in, tuple(layers), meta)


def _flip_signs(alpha0: float, chains: list[_Chain]) -> list[_Chain]:
    """Choose ``a C(t)`` or ``-a C(t + 1/2)`` so the output bias stays small.

    The bias is ``alpha0`` plus the signed coefficients; flipping a term against
    the running total keeps it within ``max(|alpha0|, max |coef|)``.
    """
    out, c = [], alpha0
    for ch in chains:
        if c * ch.coef > 0:
            ch = _Chain(ch.k, (ch.phase + 0.5) % 1.0, -ch.coef)
        c += ch.coef
        out.append(ch)
    return out


def stacked_weight_bound(coeffs: RieszCoeffs) -> float:
    """``8 max{1, |alpha0|, |alpha_k|, |beta_k|}``."""
    vals = [1.0, abs(coeffs.alpha0)] + [max(abs(a), abs(b)) for a, b in coeffs.terms.values()]
    return 8.0 * max(vals)


def build_stacked(coeffs: RieszCoeffs) -> ReluNetwork:
    """Parallel sum: one width-2 chain per nonzero coefficient.

    Chains run side by side; shorter ones are delayed by carrying their input
    coordinate ``u >= 0`` through identity units. All coefficients sit in the
    final affine map.
    """
    d = coeffs.dim
    terms = _term_chains(coeffs)
    meta = {"architecture": "stacked", "coefficients": coeffs.to_dict(),
            "basis_ids": [_id_doc(b) for b, _ in terms]}
    if not terms:
        return _constant_net(d, coeffs.alpha0, meta)
    chains = _flip_signs(coeffs.alpha0, [ch for _, ch in terms])
    plans = [(ch, *ch.steps()) for ch in chains]
    L = max(len(th) for _, th, _ in plans)

    # channel layout per layer: chain i uses 1 channel while padding, 2 after
    def width_at(layer, h):
        return 1 if layer < L - h else 2

    layers = []
    for ell in range(L):
        widths = [width_at(ell, len(th)) for _, th, _ in plans]
        prev = [d] * len(plans) if ell == 0 else [width_at(ell - 1, len(th)) for _, th, _ in plans]
        W = np.zeros((sum(widths), sum(prev) if ell else d))
        b = np.zeros(sum(widths))
        r = c = 0
        for (ch, th, sl), w, pw in zip(plans, widths, prev):
            start = L - len(th)
            j = ell - start
            row, bias = ch.u_form()
            if ell == 0:
                src = slice(0, d)
            else:
                src = slice(c, c + pw)
            if j < 0:
                # carry u
                if ell == 0:
                    W[r, src], b[r] = row, bias
                else:
                    W[r, src] = 1.0
            elif j == 0:
                if ell == 0:
                    W[r:r + 2, src] = row
                    b[r:r + 2] = (bias, bias - th[0])
                else:
                    W[r:r + 2, src] = 1.0
                    b[r + 1] = -th[0]
            else:
                W[r:r + 2, src] = [[sl[j - 1], -2 * sl[j - 1]]] * 2
                b[r + 1] = -th[j]
            r += w
            c += pw
        layers.append(AffineMap(W, b))
    out_w = np.concatenate([[-4.0 * ch.coef, 8.0 * ch.coef] for ch in chains])
    out_b = coeffs.alpha0 + math.fsum(ch.coef for ch in chains)
    layers.append(AffineMap(out_w[None, :], [out_b]))
    meta["coefficient_layer"] = L
    meta["terms"] = [{"id": _id_doc(bid), "coef": ch.coef, "phase": ch.phase}
                     for (bid, _), ch in zip(terms, chains)]
    meta["weight_bound"] = stacked_weight_bound(coeffs)
    return ReluNetwork(d, tuple(layers), meta)


def build_inline(coeffs: RieszCoeffs) -> ReluNetwork:
    """Sequential sum of width ``d + 3``.

    Channels: ``d`` source units carrying ``x`` (unchanged by ReLU on the
    cube), one collation unit holding the running sum plus the shift
    ``B0 = |alpha0| + sum(|alpha_k| + |beta_k|)``, and two working units that
    run one chain at a time.
    """
    d = coeffs.dim
    terms = _term_chains(coeffs)
    meta = {"architecture": "inline", "coefficients": coeffs.to_dict(),
            "basis_ids": [_id_doc(b) for b, _ in terms]}
    if not terms:
        return _constant_net(d, coeffs.alpha0, meta)
    B0 = abs(coeffs.alpha0) + math.fsum(abs(a) + abs(b) for a, b in coeffs.terms.values())
    width = d + 3
    col, w1 = d, d + 1
    src = slice(0, d)
    layers = []
    prev_coef = None
    for _, ch in terms:
        th, sl = ch.steps()
        row, bias = ch.u_form()
        for j in range(len(th)):
            first = not layers
            W = np.zeros((width, d if first else width))
            b = np.zeros(width)
            W[src, src] = np.eye(d)
            if first:
                b[col] = coeffs.alpha0 + B0
            else:
                W[col, col] = 1.0
            if j == 0:
                W[w1:w1 + 2, src] = row
                b[w1:w1 + 2] = (bias, bias - th[0])
                if prev_coef is not None:
                    # close the previous chain into the collation unit
                    W[col, w1:w1 + 2] = (-4.0 * prev_coef, 8.0 * prev_coef)
                    b[col] = prev_coef
            else:
                W[w1:w1 + 2, w1:w1 + 2] = [[sl[j - 1], -2 * sl[j - 1]]] * 2
                b[w1 + 1] = -th[j]
            layers.append(AffineMap(W, b))
        prev_coef = ch.coef
    out_w = np.zeros((1, width))
    out_w[0, col] = 1.0
    out_w[0, w1:w1 + 2] = (-4.0 * prev_coef, 8.0 * prev_coef)
    layers.append(AffineMap(out_w, [prev_coef - B0]))
    meta["collation_shift"] = B0
    meta["terms"] = [{"id": _id_doc(bid), "coef": ch.coef, "phase": ch.phase} for bid, ch in terms]
    return ReluNetwork(d, tuple(layers), meta)


def build(coeffs: RieszCoeffs, arch: str = "stacked") -> ReluNetwork:
    if arch == "stacked":
        return build_stacked(coeffs)
    if arch == "inline":
        return build_inline(coeffs)
    raise ValueError(f"unknown architecture {arch!r}")


def audit(net: ReluNetwork) -> dict:
    """Structural facts of a built net and the size bounds of its architecture."""
    arch = net.metadata.get("architecture", "atomic")
    rep = {
        "architecture": arch,
        "width": net.width,
        "depth": net.depth,
        "params_total": param_count(max(net.width, 1), net.depth, net.dim_in),
        "params_nonzero": nonzero_params(net),
        "max_abs_weight": net.max_abs_weight(),
        "checks": {},
    }
    coeffs = net.metadata.get("coefficients")
    if coeffs is None or arch not in ("stacked", "inline"):
        return rep
    c = RieszCoeffs.from_dict(coeffs)
    support = [k for k, (a, b) in c.items() if a != 0.0 or b != 0.0]
    if not support:
        rep["checks"]["constant_net"] = net.width == 1 and net.depth == 1
        return rep
    kmax = max(sum(abs(e) for e in k) for k in support)
    n_idx = len(support)
    checks = rep["checks"]
    if arch == "stacked":
        checks["width <= 4*#I"] = net.width <= 4 * n_idx
        checks["depth <= 4+log2(max|k|_1)"] = net.depth <= 4 + math.log2(kmax)
        checks["weights <= 8*max"] = rep["max_abs_weight"] <= stacked_weight_bound(c)
    else:
        checks["width == d+3"] = net.width == net.dim_in + 3
        checks["depth <= 2*#I*log2(16*max|k|_1)"] = net.depth <= 2 * n_idx * math.log2(16 * kmax)
    rep["ok"] = all(checks.values())
    return rep
