"""Recovery of Riesz coefficients on ``V_R`` from point samples.

``V_R`` is spanned by the constant and ``C_k, S_k`` for ``k |> 0`` with
``|k|_2 <= R``. Two estimators are provided: plain least squares and basis
pursuit denoising

    min ||c||_1   subject to   sqrt(mean((A c - y)^2)) <= delta.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .approx import lp_norm_mc
from .basis import BasisId, Kind, MultiIndex, eval_basis_batch
from .coeffs import FourierCoeffs, RieszCoeffs
from .gram import fourier_riesz_inner, gram_matrix, l2_distance, l2_inner
from .lattice import BallSpec, enumerate_half_ball
from .spectrum import RNG_ALGORITHM, make_rng

__all__ = [
    "SampleSet",
    "RecoveryReport",
    "InfeasibleError",
    "ConvergenceError",
    "vr_ids",
    "draw_samples",
    "design_matrix",
    "least_squares_recover",
    "basis_pursuit_recover",
    "recovery_error_report",
    "best_approximation",
]


class InfeasibleError(ValueError):
    """No coefficient vector meets the data-fit constraint."""


class ConvergenceError(RuntimeError):
    """Iterative solver stopped at its iteration cap."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


@dataclass
class SampleSet:
    dim: int
    points: np.ndarray
    values: np.ndarray
    seed: int | None = None
    generator: str = RNG_ALGORITHM

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.points.shape != (self.values.size, self.dim):
            raise ValueError(f"points {self.points.shape} and values {self.values.shape} do not match dim {self.dim}")
        if np.any(self.points < 0) or np.any(self.points > 1):
            raise ValueError("sample points must lie in [0, 1]^d")

    @property
    def n(self) -> int:
        return self.values.size


@dataclass
class RecoveryReport:
    method: str
    R: float
    n_basis: int
    N_samples: int
    residual_rms: float
    sigma_min: float
    sigma_max: float
    iterations: int
    error_l2_exact: float | None = None
    rank_deficient: bool = False
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def vr_ids(R: float, d: int) -> list[BasisId]:
    """Basis of ``V_R``: the constant, then ``C_k, S_k`` in lexicographic order."""
    ids = [BasisId.const(d)]
    for k in enumerate_half_ball(BallSpec.from_radius(R, d)):
        idx = MultiIndex(tuple(int(e) for e in k))
        ids.append(BasisId(Kind.COS, idx))
        ids.append(BasisId(Kind.SIN, idx))
    return ids


def draw_samples(f: RieszCoeffs | FourierCoeffs, N: int, seed: int = 0) -> SampleSet:
    """``N`` iid uniform points with exact values of ``f``."""
    if N < 1:
        raise ValueError("N must be positive")
    rng = make_rng(seed, f.dim, N)
    x = rng.random((N, f.dim))
    return SampleSet(f.dim, x, f.evaluate(x), seed)


def design_matrix(points, ids) -> np.ndarray:
    return eval_basis_batch(ids, points)


def best_approximation(f: RieszCoeffs | FourierCoeffs, R: float):
    """Orthogonal projection of ``f`` onto ``V_R`` in L2 and its exact error."""
    ids = vr_ids(R, f.dim)
    G = gram_matrix(ids).entries
    inner = fourier_riesz_inner if isinstance(f, FourierCoeffs) else l2_inner
    rhs = np.empty(len(ids))
    for i, b in enumerate(ids):
        e = np.zeros(len(ids))
        e[i] = 1.0
        rhs[i] = inner(f, RieszCoeffs.from_vector(f.dim, ids, e))
    proj = RieszCoeffs.from_vector(f.dim, ids, np.linalg.solve(G, rhs))
    return proj, l2_distance(f, proj)


def _truth_error(truth, c):
    return None if truth is None else l2_distance(truth, c)


def least_squares_recover(samples: SampleSet, R: float, *, truth=None):
    """Least-squares fit on ``V_R`` through the SVD of the design matrix.

    Rank deficiency is flagged and the minimum-norm solution returned.
    """
    ids = vr_ids(R, samples.dim)
    n, N = len(ids), samples.n
    if N < n:
        raise ValueError(f"least squares needs N >= n; got N={N}, n={n}")
    A = design_matrix(samples.points, ids)
    y = samples.values
    U, sv, Vt = np.linalg.svd(A, full_matrices=False)
    tol = max(A.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > tol))
    coef = Vt[:rank].T @ ((U[:, :rank].T @ y) / sv[:rank])
    r = A @ coef - y
    c = RieszCoeffs.from_vector(samples.dim, ids, coef)
    scaled = sv / math.sqrt(N)
    rep = RecoveryReport(
        method="ls", R=R, n_basis=n, N_samples=N, residual_rms=float(np.sqrt(np.mean(r * r))),
        sigma_min=float(scaled[-1]), sigma_max=float(scaled[0]), iterations=1,
        error_l2_exact=_truth_error(truth, c), rank_deficient=rank < n,
        extras={"rank": rank, "normal_residual": float(np.max(np.abs(A.T @ r), initial=0.0)),
                "normal_scale": float(sv[0] * np.linalg.norm(y))},
    )
    return c, rep


class _BallProjector:
    """Euclidean projection onto ``{x : ||A x - y|| <= eps}``.

    With ``A = U diag(s) V^T`` the projection of ``v`` is
    ``v + V (lam s (U^T y - s V^T v) / (1 + lam s^2))`` where ``lam`` solves the
    secular equation ``||A x - y|| = eps``; it is found by safeguarded Newton
    steps in ``log lam``, warm-started from the previous call.
    """

    def __init__(self, A, y, eps):
        U, sv, Vt = np.linalg.svd(A, full_matrices=False)
        tol = max(A.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
        r = int(np.sum(sv > tol))
        self.U, self.s, self.V = U[:, :r], sv[:r], Vt[:r].T
        self.y, self.eps = y, eps
        self.yt = self.U.T @ y
        self.y_perp = float(np.linalg.norm(y - self.U @ self.yt))
        # roundoff of the range projection is not infeasibility
        slack = 1e-12 * max(float(np.linalg.norm(y)), 1.0)
        if self.y_perp > eps + slack:
            raise InfeasibleError(
                f"data-fit radius {eps:.3e} is below the distance {self.y_perp:.3e} of y to range(A)")
        self.target = max(eps * eps - self.y_perp ** 2, 0.0)
        self.t = 0.0

    def _solve(self, g):
        s2 = self.s * self.s
        target = self.target

        def phi(t):
            lam = math.exp(t)
            den = 1.0 + lam * s2
            f = float(np.sum((g / den) ** 2))
            df = float(np.sum(-2.0 * g * g * s2 / den ** 3)) * lam
            return math.log(f) - math.log(target), df / f

        lo, hi = -60.0, 60.0
        t = min(max(self.t, lo), hi)
        for _ in range(100):
            val, der = phi(t)
            if val > 0:
                lo = t
            else:
                hi = t
            if abs(val) < 1e-13 or hi - lo < 1e-13:
                break
            step = t - val / der if der < 0 else 0.5 * (lo + hi)
            t = step if lo < step < hi else 0.5 * (lo + hi)
        self.t = t
        return math.exp(t)

    def __call__(self, v):
        s, yt = self.s, self.yt
        vt = self.V.T @ v
        g = s * vt - yt
        if float(g @ g) + self.y_perp ** 2 <= self.eps ** 2:
            return v
        if self.target <= 0.0 or float(g @ g) <= 0.0:
            return v + self.V @ ((yt - s * vt) / s)
        lam = self._solve(g)
        return v + self.V @ (lam * s * (yt - s * vt) / (1 + lam * s * s))


def _soft(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _admm(proj, n, scale, max_iter, tol):
    x = z = u = np.zeros(n)
    rho = 1.0 / max(scale, 1e-300)
    it = 0
    relax = 1.6
    for it in range(1, max_iter + 1):
        x = proj(z - u)
        z_old = z
        xh = relax * x + (1 - relax) * z_old
        z = _soft(xh + u, 1.0 / rho)
        u = u + xh - z
        r_pri = float(np.linalg.norm(x - z))
        r_dual = rho * float(np.linalg.norm(z - z_old))
        if r_pri <= tol * max(scale, 1.0) and float(np.linalg.norm(z - z_old)) <= tol * max(scale, 1.0):
            return x, z, it, True
        # residual balancing
        if it % 20 == 0:
            if r_pri > 10 * r_dual:
                rho *= 2.0
                u = u / 2.0
            elif r_dual > 10 * r_pri:
                rho /= 2.0
                u = u * 2.0
    return x, z, it, False


def _fista_lasso(A, y, lam, x0, max_iter, tol):
    Lc = float(np.linalg.norm(A, 2)) ** 2
    x = x0.copy()
    w = x.copy()
    t = 1.0
    for _ in range(max_iter):
        x_new = _soft(w - A.T @ (A @ w - y) / Lc, lam / Lc)
        t_new = (1 + math.sqrt(1 + 4 * t * t)) / 2
        w = x_new + ((t - 1) / t_new) * (x_new - x)
        if np.linalg.norm(x_new - x) <= tol * max(1.0, np.linalg.norm(x)):
            return x_new
        x, t = x_new, t_new
    return x


def _lasso_bisection(A, y, eps, max_iter, tol):
    """Penalized form with the multiplier bisected until the fit reaches ``eps``."""
    lam_hi = float(np.max(np.abs(A.T @ y)))
    lam_lo = 0.0
    x = np.zeros(A.shape[1])
    for _ in range(60):
        lam = 0.5 * (lam_lo + lam_hi)
        x = _fista_lasso(A, y, lam, x, max_iter, tol)
        if np.linalg.norm(A @ x - y) > eps:
            lam_hi = lam
        else:
            lam_lo = lam
        if lam_hi - lam_lo <= 1e-12 * max(lam_hi, 1e-300):
            break
    return _fista_lasso(A, y, lam_lo, x, max_iter, tol)


def basis_pursuit_recover(samples: SampleSet, R: float, delta: float, *, truth=None,
                          max_iter: int = 50_000, tol: float = 1e-9):
    """l1-minimal coefficients on ``V_R`` with empirical RMS misfit at most ``delta``.

    Solved by ADMM on the constrained form; if that stalls, the penalized
    problem is solved by FISTA with a bisected multiplier. The l1 objective
    includes the constant coefficient. The returned fit meets the constraint
    up to ``1e-9 max|y|`` in RMS.
    """
    if delta < 0:
        raise InfeasibleError("delta must be nonnegative")
    ids = vr_ids(R, samples.dim)
    n, N = len(ids), samples.n
    y = samples.values
    A = design_matrix(samples.points, ids)
    sv = np.linalg.svd(A, compute_uv=False) / math.sqrt(N)
    eps = delta * math.sqrt(N)

    def finish(coef, iters, solver):
        r = A @ coef - y
        c = RieszCoeffs.from_vector(samples.dim, ids, coef)
        rep = RecoveryReport(
            method="bp", R=R, n_basis=n, N_samples=N, residual_rms=float(np.sqrt(np.mean(r * r))),
            sigma_min=float(sv[-1]), sigma_max=float(sv[0]), iterations=iters,
            error_l2_exact=_truth_error(truth, c),
            extras={"delta": delta, "l1_norm": float(np.sum(np.abs(coef))), "solver": solver},
        )
        return c, rep

    if math.sqrt(float(np.mean(y * y))) <= delta:
        return finish(np.zeros(n), 0, "trivial")
    proj = _BallProjector(A, y, eps)
    scale = float(np.max(np.abs(y)))
    x, z, iters, ok = _admm(proj, n, scale, max_iter, tol)
    slack = 1e-9 * max(scale, 1.0) * math.sqrt(N)
    if ok:
        # z is sparse; keep it when it meets the constraint to within the tolerance
        coef = z if np.linalg.norm(A @ z - y) <= eps + slack else x
        return finish(coef, iters, "admm")
    coef = _lasso_bisection(A, y, eps, max_iter, tol)
    if np.linalg.norm(A @ coef - y) <= eps + slack:
        return finish(coef, iters, "fista-bisection")
    raise ConvergenceError(
        f"basis pursuit did not converge in {max_iter} iterations",
        {"admm_primal_gap": float(np.linalg.norm(x - z)),
         "fallback_misfit": float(np.linalg.norm(A @ coef - y)), "eps": eps})


def recovery_error_report(truth, recovered: RieszCoeffs, p_list=(2.0, math.inf), *,
                          n_samples: int = 20_000, seed: int = 0, k: int | None = None,
                          s: float = 0.5, R: float | None = None, C_s: float = 1.0) -> dict:
    """Exact L2 error, Monte Carlo ``L_p`` errors and the two-term bound.

    The bound ``C_s (k^(-1/p) sigma_k + k^(1/2 - 1/p) R^-s ||f||)`` uses the
    l1 best ``k``-term error of the truth on ``V_R``; it needs ``k`` and ``R``.
    """
    if truth.dim != recovered.dim:
        raise ValueError("dimension mismatch")
    out = {"error_l2_exact": l2_distance(truth, recovered), "lp": {}, "bound": {}}

    def diff(x):
        return truth.evaluate(x) - recovered.evaluate(x)

    for p in p_list:
        est = lp_norm_mc(diff, truth.dim, p, n_samples, seed)
        out["lp"][str(p)] = {"value": est.value, "stderr": est.stderr}
    if k is not None and R is not None and isinstance(truth, RieszCoeffs):
        K, a, b = truth.arrays()
        inside = (K * K).sum(axis=1) <= math.floor(R * R)
        mags = np.sort(np.abs(np.concatenate([a[inside], b[inside]])))[::-1]
        sigma_k = float(np.sum(mags[k:]))
        w = np.sqrt((K * K).sum(axis=1).astype(float)) ** s
        f_norm = abs(truth.alpha0) + float(np.sum(w * (np.abs(a) + np.abs(b))))
        for p in p_list:
            ip = 0.0 if math.isinf(p) else 1.0 / p
            out["bound"][str(p)] = C_s * (k ** (-ip) * sigma_k + k ** (0.5 - ip) * R ** (-s) * f_norm)
    return out
