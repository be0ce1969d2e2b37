"""Network approximation of Sobolev and Barron functions with error certificates.

Both pipelines go through the Riesz coefficients. Since the synthesis operator
has upper constant 1/2,

    ||sum c_j phi_j||_2 <= ||c||_2 / sqrt(2),

any bound on the discarded coefficients becomes an L2 certificate. The exact
error is measured independently through closed-form inner products.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import qmc

from . import _constants
from .coeffs import FourierCoeffs, RieszCoeffs
from .constructions import build
from .gram import l2_distance
from .lattice import DEFAULT_CONFIG, LatticeConfig, count_ball, BallSpec
from .network import ReluNetwork, eval_net, nonzero_params, param_count
from .spectrum import DEFAULT_TRUNC_L, Space, make_rng, norm, odd_squarefree_zeta, riesz_arrays

__all__ = [
    "ApproxReport",
    "LpEstimate",
    "radius_for_eps",
    "truncate_radius",
    "best_n_term",
    "sigma_upper_bound",
    "sobolev_transfer_constant",
    "approximate_sobolev",
    "approximate_barron",
    "lp_error_mc",
    "lp_norm_mc",
]

_SQRT_HALF = math.sqrt(0.5)


@dataclass
class ApproxReport:
    epsilon_target: float
    radius: float
    n_terms: int
    width: int
    depth: int
    params: int
    params_nonzero: int
    error_l2_exact: float
    error_bound_certified: float
    architecture: str
    input_norm: float
    space: str
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def radius_for_eps(s: float, eps: float, C_s: float) -> float:
    """``R = (C_s / eps)^(1/s)``."""
    if not (s > 0 and eps > 0 and C_s > 0):
        raise ValueError("s, eps and C_s must be positive")
    return (C_s / eps) ** (1.0 / s)


def _within(K: np.ndarray, R: float) -> np.ndarray:
    T = math.floor(Fraction(R) ** 2)
    return (K * K).sum(axis=1) <= T


def truncate_radius(c: RieszCoeffs, R: float, s: float):
    """Split at ``|k|_2 <= R``.

    Returns ``(head, bound)`` with ``bound = R^-s sqrt(sum_tail |k|^2s
    (alpha^2 + beta^2))``, which dominates both the coefficient l2 norm of the
    tail and its L2 norm.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    K, a, b = c.arrays()
    inside = _within(K, R)
    head = RieszCoeffs(c.dim, c.alpha0, {tuple(k): (x, y) for k, x, y in
                                          zip(K[inside].tolist(), a[inside].tolist(), b[inside].tolist())})
    out = ~inside
    w2 = (K[out] * K[out]).sum(axis=1).astype(float) ** s
    bound = R ** (-s) * math.sqrt(math.fsum(w2 * (a[out] ** 2 + b[out] ** 2)))
    return head, bound


def best_n_term(c: RieszCoeffs, n: int):
    """Keep the ``n`` largest of the merged ``(alpha, beta)`` entries.

    Ties go to the lexicographically smaller index, ``alpha`` before ``beta``.
    The constant is always kept and never counted. Returns ``(selected, sigma)``
    with ``sigma`` the l2 norm of the dropped entries.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    entries = []
    for k, (a, b) in c.items():
        if a != 0.0:
            entries.append((-abs(a), k, 0, a))
        if b != 0.0:
            entries.append((-abs(b), k, 1, b))
    entries.sort(key=lambda e: e[:3])
    kept: dict[tuple[int, ...], list[float]] = {}
    for _, k, slot, v in entries[:n]:
        kept.setdefault(k, [0.0, 0.0])[slot] = v
    sigma = math.sqrt(math.fsum(e[3] ** 2 for e in entries[n:]))
    return RieszCoeffs(c.dim, c.alpha0, {k: tuple(v) for k, v in kept.items()}), sigma


def sigma_upper_bound(n: int, d: int, s: float, constants: dict | None = None,
                      config: LatticeConfig = DEFAULT_CONFIG) -> float:
    """Class bound for best ``n``-term approximation of unit ``b_s^d`` sequences in l2.

    For ``d = 1`` the explicit ``(s+1)/sqrt(2s+1) n^(-s-1/2)``. For ``d >= 2`` the
    square root of ``C_s`` times

        1/n                                   n <= c2 d
        (log(c2 d)/log n)^s / n               c2 d < n <= (c1/2)^d
        d^-s n^(-2s/d - 1)                    otherwise

    with ``C_s`` from the calibration table unless given as ``constants["C_s"]``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if s < 0:
        raise ValueError("s must be nonnegative")
    if d == 1:
        return (s + 1) / math.sqrt(2 * s + 1) * n ** (-s - 0.5)
    C_s = (constants or {}).get("C_s")
    if C_s is None:
        C_s = _constants.sigma_constant(s)
    c2d = config.c2 * d
    if n <= c2d:
        prof = 1.0 / n
    elif math.log(n) <= d * math.log(config.c1 / 2):
        prof = (math.log(c2d) / math.log(n)) ** s / n
    else:
        prof = d ** (-s) * n ** (-2 * s / d - 1)
    return math.sqrt(C_s * prof)


def sobolev_transfer_constant(s: float) -> float:
    """``A_s = sum_{q odd squarefree} q^(s-2)``, an upper bound."""
    return odd_squarefree_zeta(2.0 - s)


def _net_fields(net: ReluNetwork) -> dict:
    W = max(net.width, 1)
    return {"width": net.width, "depth": net.depth,
            "params": param_count(W, net.depth, net.dim_in), "params_nonzero": nonzero_params(net)}


def _riesz_parts(c, L):
    """``(K, alpha, beta, alpha0, l1_tail)`` for either container."""
    if isinstance(c, FourierCoeffs):
        K, a, b, tail = riesz_arrays(c, L)
        return K, a, b, c.a0, tail
    K, a, b = c.arrays()
    return K, a, b, c.alpha0, 0.0


def _coeffs_from(dim, const, K, a, b) -> RieszCoeffs:
    return RieszCoeffs(dim, const, {tuple(k): (x, y) for k, x, y in zip(K.tolist(), a.tolist(), b.tolist())})


def approximate_sobolev(c, s: float, eps: float | None = None, arch: str = "stacked", *,
                        radius: float | None = None, C_s: float | None = None,
                        L: int = DEFAULT_TRUNC_L):
    """Radius truncation of a Sobolev function realized as a ReLU network.

    ``R = (C_s/eps)^(1/s)`` with the calibrated ``C_s`` unless ``radius`` is
    given. Fourier inputs are converted first; the certificate is
    ``(||tail||_2 + tau) / sqrt(2)``, where ``tail`` holds the computed Riesz
    coefficients outside the ball and ``tau`` bounds the l1 mass of the
    multipliers beyond ``2L + 1``.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if radius is None:
        if eps is None or not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        radius = radius_for_eps(s, eps, C_s if C_s is not None else _constants.sobolev_constant(s))
    space = Space.WS if isinstance(c, FourierCoeffs) else Space.FS
    f_norm = norm(space, s, c)
    K, a, b, const, tau = _riesz_parts(c, L)
    inside = _within(K, radius)
    head = _coeffs_from(c.dim, const, K[inside], a[inside], b[inside])
    tail = math.sqrt(math.fsum(a[~inside] ** 2) + math.fsum(b[~inside] ** 2))
    cert = _SQRT_HALF * (tail + tau)
    net = build(head, arch)
    exact = l2_distance(c, head)
    rep = ApproxReport(
        epsilon_target=float("nan") if eps is None else eps, radius=radius, n_terms=len(head.nonzero()),
        **_net_fields(net), error_l2_exact=exact, error_bound_certified=cert,
        architecture=arch, input_norm=f_norm, space=space.value,
        extras={"tail_l2_coeffs": tail, "transform_tail_l1": tau,
                "width_bound": 4 * count_ball(BallSpec.from_radius(radius, c.dim)),
                "depth_bound": 4 + math.log2(radius * math.sqrt(min(radius, c.dim)))},
    )
    return net, rep


def approximate_barron(c, s: float, eps: float, arch: str = "stacked", *,
                       C: float = 2.0, L: int = DEFAULT_TRUNC_L):
    """Radius truncation followed by best ``n``-term selection.

    ``R = (C/eps)^(1/s)``; ``n`` is the least count whose certificate
    ``(sqrt(tail^2 + sigma_n^2) + tau) / sqrt(2)`` is at most ``eps ||f||``.
    If no ``n`` suffices the whole head is kept and ``extras["target_met"]``
    is false.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    space = Space.BS if isinstance(c, FourierCoeffs) else Space.BS_SEQ
    f_norm = norm(space, s, c)
    R = radius_for_eps(s, eps, C)
    K, a, b, const, tau = _riesz_parts(c, L)
    inside = _within(K, R)
    tail = math.sqrt(math.fsum(a[~inside] ** 2) + math.fsum(b[~inside] ** 2))
    vals = np.concatenate([a[inside], b[inside]])
    vals = vals[vals != 0.0]
    # sigma_n^2 for every n at once: suffix sums of the sorted squares
    sq = np.sort(vals * vals)
    suffix = np.concatenate([np.cumsum(sq)[::-1], [0.0]])
    cert_n = _SQRT_HALF * (np.sqrt(tail * tail + suffix) + tau)
    ok = np.nonzero(cert_n <= eps * f_norm)[0]
    met = ok.size > 0
    n = int(ok[0]) if met else len(vals)
    head = _coeffs_from(c.dim, const, K[inside], a[inside], b[inside])
    selected, sigma = best_n_term(head, n)
    net = build(selected, arch)
    cert = _SQRT_HALF * (math.sqrt(tail * tail + sigma * sigma) + tau)
    exact = l2_distance(c, selected)
    class_bound = None
    if n >= 1:
        try:
            class_bound = sigma_upper_bound(n, c.dim, s)
        except RuntimeError:
            class_bound = None
    rep = ApproxReport(
        epsilon_target=eps, radius=R, n_terms=n, **_net_fields(net),
        error_l2_exact=exact, error_bound_certified=cert, architecture=arch,
        input_norm=f_norm, space=space.value,
        extras={"sigma_n": sigma, "tail_l2_coeffs": tail, "transform_tail_l1": tau,
                "target_met": met, "sigma_class_bound": class_bound},
    )
    return net, rep


@dataclass
class LpEstimate:
    value: float
    stderr: float
    p: float
    n_samples: int
    random_max: float | None = None
    qmc_max: float | None = None


def lp_norm_mc(fn, dim: int, p: float = 2.0, n_samples: int = 10_000, seed: int = 0) -> LpEstimate:
    """Monte Carlo ``||fn||_p`` on ``[0, 1]^dim`` for a vectorized ``fn``.

    For finite ``p`` the standard error comes from the delta method. For
    ``p = inf`` the maximum is taken over the random points and over a
    scrambled Sobol set of about the same size.
    """
    if not p >= 2:
        raise ValueError("p must be at least 2")
    rng = make_rng(seed, dim, n_samples)
    x = rng.random((n_samples, dim))
    err = np.abs(fn(x))
    if math.isinf(p):
        sob = qmc.Sobol(dim, scramble=True, seed=rng)
        y = sob.random_base2(max(0, math.ceil(math.log2(n_samples))))
        qerr = np.abs(fn(y))
        rmax, qmax = float(err.max()), float(qerr.max())
        return LpEstimate(max(rmax, qmax), float("nan"), p, n_samples, rmax, qmax)
    mp = err ** p
    mean = float(mp.mean())
    se_mean = float(mp.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else float("nan")
    value = mean ** (1.0 / p)
    stderr = (mean ** (1.0 / p - 1.0) / p) * se_mean if mean > 0 else 0.0
    return LpEstimate(value, stderr, p, n_samples)


def lp_error_mc(reference, net: ReluNetwork, p: float = 2.0, n_samples: int = 10_000,
                seed: int = 0) -> LpEstimate:
    """Monte Carlo ``||reference - net||_p``; see :func:`lp_norm_mc`."""
    return lp_norm_mc(lambda x: reference.evaluate(x) - eval_net(net, x), net.dim_in, p, n_samples, seed)
