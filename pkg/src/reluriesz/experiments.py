"""Grid experiments driven by a JSON config, written as CSV.

Every CSV starts with ``#`` provenance lines (tool version, config hash,
seeds, generator id) followed by a header row. Rows are sorted by their grid
key, so the file does not depend on the order cells finish in. Floats are
written with 17 significant digits.

Config kinds and their fields (lists are grids):

``rates_sobolev``   dims, s, radii, seeds, r_max (64), arch ("stacked")
``rates_barron``    dims, s, eps, seeds, support_radius (4), arch
``gram_check``      dims, radii
``lattice_bounds``  dims, t
``recovery_sweep``  methods, dims, s, radii, n_samples, seeds, support_radius (R + 2),
                    delta ("auto": 1.01 x least-squares residual rms)
"""

from __future__ import annotations

import concurrent.futures as cf
import hashlib
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .approx import approximate_barron, approximate_sobolev, lp_norm_mc
from .basis import BasisId
from .gram import gram_matrix, l2_distance
from .lattice import BallSpec, bound_terms, count_ball, enumerate_half_ball
from .recovery import basis_pursuit_recover, draw_samples, least_squares_recover
from .spectrum import RNG_ALGORITHM, random_unit_ball

__all__ = ["ConfigError", "ExperimentConfig", "COLUMNS", "run", "write_csv", "format_value"]


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


COLUMNS = {
    "rates_sobolev": ["dim", "s", "seed", "R", "width", "depth", "params_total", "params_nonzero",
                      "error_l2", "certified_bound", "error"],
    "rates_barron": ["dim", "s", "seed", "eps", "n", "R", "width", "depth", "params_total",
                     "params_nonzero", "error_l2", "certified_bound", "error"],
    "gram_check": ["dim", "R", "n_ids", "eig_min", "eig_max", "within_bounds", "error"],
    "lattice_bounds": ["dim", "t", "N", "log_bound_i", "log_bound_ii", "regime", "holds", "error"],
    "recovery_sweep": ["method", "d", "s", "R", "n_basis", "N", "seed", "residual_rms", "err_l2",
                       "err_linf", "sigma_min", "iterations", "error"],
}

_GRIDS = {
    "rates_sobolev": ("dims", "s", "seeds", "radii"),
    "rates_barron": ("dims", "s", "seeds", "eps"),
    "gram_check": ("dims", "radii"),
    "lattice_bounds": ("dims", "t"),
    "recovery_sweep": ("methods", "dims", "s", "radii", "n_samples", "seeds"),
}


@dataclass
class ExperimentConfig:
    kind: str
    grids: dict
    options: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config: expected a JSON object")
        kind = doc.get("kind")
        if kind not in _GRIDS:
            raise ConfigError(f"kind: expected one of {sorted(_GRIDS)}, got {kind!r}")
        grids = {}
        for name in _GRIDS[kind]:
            val = doc.get(name)
            if not isinstance(val, list):
                raise ConfigError(f"{name}: expected a list")
            if not val:
                raise ConfigError(f"{name}: grid is empty")
            grids[name] = val
        for s in grids.get("s", []):
            if not (isinstance(s, (int, float)) and 0 < s < 1):
                raise ConfigError(f"s: value {s!r} outside (0, 1)")
        for m in grids.get("methods", []):
            if m not in ("ls", "bp"):
                raise ConfigError(f"methods: unknown method {m!r}")
        for d in grids.get("dims", []):
            if not (isinstance(d, int) and d >= 1):
                raise ConfigError(f"dims: value {d!r} is not a positive integer")
        options = {k: v for k, v in doc.items() if k not in _GRIDS[kind] and k != "kind"}
        return cls(kind, grids, options, doc)

    @property
    def digest(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def cells(self):
        names = _GRIDS[self.kind]
        for combo in itertools.product(*(self.grids[n] for n in names)):
            yield dict(zip(names, combo))


def _net_cols(rep):
    return {"width": rep.width, "depth": rep.depth, "params_total": rep.params,
            "params_nonzero": rep.params_nonzero, "error_l2": rep.error_l2_exact,
            "certified_bound": rep.error_bound_certified}


def _cell_rates_sobolev(cell, opt):
    d, s, seed, R = cell["dims"], cell["s"], cell["seeds"], cell["radii"]
    f = random_unit_ball("Ws", d, s, opt.get("r_max", 64), seed=seed, decay=s + d / 2)
    _, rep = approximate_sobolev(f, s, arch=opt.get("arch", "stacked"), radius=R)
    return {"dim": d, "s": s, "seed": seed, "R": R, **_net_cols(rep)}


def _cell_rates_barron(cell, opt):
    d, s, seed, eps = cell["dims"], cell["s"], cell["seeds"], cell["eps"]
    f = random_unit_ball("Bs", d, s, opt.get("support_radius", 4), seed=seed)
    _, rep = approximate_barron(f, s, eps, arch=opt.get("arch", "stacked"))
    return {"dim": d, "s": s, "seed": seed, "eps": eps, "n": rep.n_terms, "R": rep.radius, **_net_cols(rep)}


def _cell_gram(cell, opt):
    d, R = cell["dims"], cell["radii"]
    ids = [BasisId.const(d)]
    for k in enumerate_half_ball(BallSpec.from_radius(R, d)):
        ids += [BasisId.cos(*k.tolist()), BasisId.sin(*k.tolist())]
    ev = gram_matrix(ids).normalized().eigenvalues()
    lo, hi = float(ev.min()), float(ev.max())
    return {"dim": d, "R": R, "n_ids": len(ids), "eig_min": lo, "eig_max": hi,
            "within_bounds": lo >= 0.5 - 1e-8 and hi <= 1.5 + 1e-8}


def _cell_lattice(cell, opt):
    d, t = cell["dims"], cell["t"]
    spec = BallSpec.from_radius(t, d)
    N = count_ball(spec)
    li, lii = bound_terms(spec)
    regime = "i" if 4 * spec.t2 >= d else "ii"
    logN = math.log(N)
    holds = logN <= (li if regime == "i" else lii) + 1e-12
    return {"dim": d, "t": t, "N": N, "log_bound_i": li, "log_bound_ii": lii, "regime": regime, "holds": holds}


def _cell_recovery(cell, opt):
    method, d, s, R, N, seed = (cell[k] for k in ("methods", "dims", "s", "radii", "n_samples", "seeds"))
    f = random_unit_ball("Bs", d, s, opt.get("support_radius", R + 2), seed=seed)
    samples = draw_samples(f, N, seed)
    if method == "ls":
        c, rep = least_squares_recover(samples, R)
    else:
        delta = opt.get("delta", "auto")
        if delta == "auto":
            # smallest feasible misfit, with 1% slack
            delta = 1.01 * least_squares_recover(samples, R)[1].residual_rms + 1e-12
        c, rep = basis_pursuit_recover(samples, R, delta)
    err_inf = lp_norm_mc(lambda x: f.evaluate(x) - c.evaluate(x), d, math.inf, 4096, seed).value
    return {"method": method, "d": d, "s": s, "R": R, "n_basis": rep.n_basis, "N": N, "seed": seed,
            "residual_rms": rep.residual_rms, "err_l2": l2_distance(f, c), "err_linf": err_inf,
            "sigma_min": rep.sigma_min, "iterations": rep.iterations}


_RUNNERS = {
    "rates_sobolev": _cell_rates_sobolev,
    "rates_barron": _cell_rates_barron,
    "gram_check": _cell_gram,
    "lattice_bounds": _cell_lattice,
    "recovery_sweep": _cell_recovery,
}


def _key_of(kind, cell):
    return tuple(cell[n] for n in _GRIDS[kind])


def _run_cell(kind, cell, options):
    try:
        row = _RUNNERS[kind](cell, options)
        row["error"] = ""
    except Exception as exc:  # recorded in the CSV, the run goes on
        row = {col: "" for col in COLUMNS[kind]}
        for n, col in zip(_GRIDS[kind], _key_cols(kind)):
            row[col] = cell[n]
        row["error"] = f"{type(exc).__name__}: {exc}"
    return _key_of(kind, cell), row


def _key_cols(kind):
    return {
        "rates_sobolev": ("dim", "s", "seed", "R"),
        "rates_barron": ("dim", "s", "seed", "eps"),
        "gram_check": ("dim", "R"),
        "lattice_bounds": ("dim", "t"),
        "recovery_sweep": ("method", "d", "s", "R", "N", "seed"),
    }[kind]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(kind: str, rows: list[dict], provenance: dict) -> str:
    buf = io.StringIO()
    for k in sorted(provenance):
        buf.write(f"# {k}: {provenance[k]}\n")
    cols = COLUMNS[kind]
    buf.write(",".join(cols) + "\n")
    for row in rows:
        cells = []
        for c in cols:
            text = format_value(row.get(c, ""))
            if any(ch in text for ch in ',"\n'):
                text = '"' + text.replace('"', '""') + '"'
            cells.append(text)
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def run(config: ExperimentConfig | dict, workers: int = 1) -> str:
    """Run every grid cell and return the CSV text."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    cells = list(config.cells())
    if workers > 1:
        with cf.ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_cell, [config.kind] * len(cells), cells,
                                    [config.options] * len(cells)))
    else:
        results = [_run_cell(config.kind, c, config.options) for c in cells]
    results.sort(key=lambda kr: tuple((0, x) if isinstance(x, (int, float)) else (1, str(x)) for x in kr[0]))
    seeds = config.grids.get("seeds", [])
    prov = {"tool": f"reluriesz {__version__}", "config_sha256": config.digest, "kind": config.kind,
            "seeds": json.dumps(seeds), "generator": RNG_ALGORITHM}
    return write_csv(config.kind, [r for _, r in results], prov)
