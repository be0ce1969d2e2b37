"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 failed audit, 4 solver did not
converge. Results go to standard output or to the paths given; diagnostics go
to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .basis import BasisId, Kind, MultiIndex, eval_basis
from .coeffs import FourierCoeffs, RieszCoeffs, dumps_coeffs, load_coeffs
from .constructions import audit, build
from .experiments import ConfigError, ExperimentConfig, format_value
from .experiments import run as run_experiment
from .gram import gram_matrix
from .lattice import (
    BallSpec,
    CapExceededError,
    bound_terms,
    count_ball,
    count_ball_recursive,
    enumerate_ball,
    enumerate_half_ball,
    log_upper_bound_N,
)
from .network import NetworkFormatError, deserialize, eval_net, serialize
from .recovery import (
    ConvergenceError,
    InfeasibleError,
    basis_pursuit_recover,
    draw_samples,
    least_squares_recover,
)
from .spectrum import DEFAULT_TRUNC_L, DEFAULT_TRUNC_P, fourier_to_riesz, mobius, riesz_to_fourier

log = logging.getLogger("reluriesz")

EXIT_OK, EXIT_INVALID, EXIT_AUDIT, EXIT_SOLVER = 0, 2, 3, 4
CONFIG_DIR_ENV = "RELURIESZ_CONFIG_DIR"


class AuditFailure(RuntimeError):
    pass


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _load_net(path):
    with open(path, "rb") as fh:
        return deserialize(fh.read())


def _riesz(path) -> RieszCoeffs:
    c = load_coeffs(path)
    if isinstance(c, FourierCoeffs):
        c, tail = fourier_to_riesz(c)
        log.info("converted Fourier input, l1 transform tail <= %.3e", tail)
    return c


# -- subcommands --------------------------------------------------------------

def cmd_basis_eval(a):
    bid = BasisId.const(len(a.x)) if a.kind == "const" else BasisId(Kind(a.kind), MultiIndex(tuple(a.k)))
    print(format_value(eval_basis(bid, a.x)))


def cmd_lattice_count(a):
    spec = BallSpec.from_radius(a.t, a.d)
    n = count_ball_recursive(spec) if a.method == "recursive" else (
        len(enumerate_ball(spec, cap=a.cap)) if a.method == "enum" else count_ball(spec))
    print(n)


def cmd_lattice_enum(a):
    spec = BallSpec.from_radius(a.t, a.d)
    pts = enumerate_half_ball(spec, cap=a.cap) if a.half else enumerate_ball(spec, cap=a.cap)
    lines = [",".join(f"k{i + 1}" for i in range(a.d))] + [",".join(map(str, p)) for p in pts.tolist()]
    _emit("\n".join(lines), a.out)


def cmd_lattice_bounds(a):
    spec = BallSpec.from_radius(a.t, a.d)
    li, lii = bound_terms(spec)
    n = count_ball(spec)
    out = {"t": a.t, "d": a.d, "N": n, "log_bound_i": li, "log_bound_ii": lii,
           "regime": "i" if 4 * spec.t2 >= a.d else "ii", "log_bound": log_upper_bound_N(spec)}
    out["holds"] = math.log(n) <= out["log_bound"] + 1e-12
    print(_json(out))


def cmd_mobius(a):
    print(mobius(a.n))


def cmd_transform(a):
    c = load_coeffs(a.inp)
    if a.dir == "f2r":
        if not isinstance(c, FourierCoeffs):
            raise ValueError("f2r expects a Fourier coefficient file (field 'a0')")
        out, tail = fourier_to_riesz(c, DEFAULT_TRUNC_L if a.trunc is None else a.trunc)
    else:
        if not isinstance(c, RieszCoeffs):
            raise ValueError("r2f expects a Riesz coefficient file (field 'alpha0')")
        out, tail = riesz_to_fourier(c, DEFAULT_TRUNC_P if a.trunc is None else a.trunc)
    log.info("tail bound %.17g", tail)
    _emit(dumps_coeffs(out), a.out)


def cmd_gram(a):
    ids = [BasisId.const(a.dim)]
    for k in enumerate_half_ball(BallSpec.from_radius(a.radius, a.dim)):
        ids += [BasisId.cos(*k.tolist()), BasisId.sin(*k.tolist())]
    G = gram_matrix(ids)
    if a.normalized:
        G = G.normalized()
    ev = G.eigenvalues()
    if a.csv:
        rows = ["i,j,id_i,id_j,value"]
        ii, jj = np.nonzero(G.entries)
        for i, j in zip(ii.tolist(), jj.tolist()):
            rows.append(f"{i},{j},{_id_text(ids[i])},{_id_text(ids[j])},{format_value(G.entries[i, j])}")
        _emit("\n".join(rows), a.csv)
    print(_json({"n": len(ids), "normalized": a.normalized, "eig_min": float(ev.min()),
                 "eig_max": float(ev.max())}))


def _id_text(b: BasisId) -> str:
    return "const" if b.kind is Kind.CONST else f"{b.kind.value}({' '.join(map(str, b.index.entries))})"


def cmd_net_build(a):
    net = build(_riesz(a.inp), a.arch)
    _emit(serialize(net).decode(), a.out)


def cmd_net_eval(a):
    net = _load_net(a.net)
    if a.points:
        pts = np.loadtxt(a.points, delimiter=",", ndmin=2)
        vals = eval_net(net, pts)
        print("\n".join(format_value(v) for v in vals))
    else:
        print(format_value(eval_net(net, np.array(a.x, dtype=float))))


def cmd_net_check(a):
    net = _load_net(a.net)
    rep = audit(net)
    failed = [name for name, ok in rep["checks"].items() if not ok]
    coeffs = net.metadata.get("coefficients")
    if coeffs is not None:
        c = RieszCoeffs.from_dict(coeffs)
        rng = np.random.default_rng(a.seed)
        x = rng.random((a.points, net.dim_in))
        err = float(np.max(np.abs(eval_net(net, x) - c.evaluate(x))))
        rep["exactness_max_error"] = err
        if err > a.tol:
            failed.append(f"exactness (max error {err:.3e} > {a.tol:.0e})")
    rep["failed"] = failed
    print(_json(rep))
    if failed:
        raise AuditFailure("violated: " + "; ".join(failed))


def cmd_net_export(a):
    net = _load_net(a.net)
    if a.format == "npz":
        arrays = {}
        for i, A in enumerate(net.layers):
            arrays[f"W{i}"] = A.weights
            arrays[f"b{i}"] = A.bias
        np.savez(a.out, **arrays)
    else:
        lines = [f"dim_in {net.dim_in} width {net.width} depth {net.depth}"]
        for i, A in enumerate(net.layers):
            lines.append(f"layer {i}: {A.n_in} -> {A.n_out}")
            for row, b in zip(A.weights.tolist(), A.bias.tolist()):
                lines.append("  " + " ".join(format_value(v) for v in row) + " | " + format_value(b))
        _emit("\n".join(lines), a.out)


def cmd_approx(a):
    from .approx import approximate_barron, approximate_sobolev

    c = load_coeffs(a.inp)
    if a.kind == "sobolev":
        net, rep = approximate_sobolev(c, a.s, a.eps, a.arch, radius=a.radius)
    else:
        net, rep = approximate_barron(c, a.s, a.eps, a.arch)
    _emit(serialize(net).decode(), a.out)
    text = _json(rep.to_dict())
    if a.report:
        _emit(text, a.report)
    else:
        print(text)


def cmd_recover(a):
    if a.batch:
        cfg = _read_config(a.batch)
        cfg.setdefault("kind", "recovery_sweep")
        _emit(run_experiment(ExperimentConfig.from_dict(cfg), a.workers), a.csv)
        return
    if a.truth is None or a.radius is None or a.n_samples is None:
        raise ValueError("recover needs --truth, --radius and --n-samples (or --batch)")
    truth = load_coeffs(a.truth)
    samples = draw_samples(truth, a.n_samples, a.seed)
    attempt = 0
    while True:
        if a.method == "ls":
            c, rep = least_squares_recover(samples, a.radius, truth=truth)
        else:
            c, rep = basis_pursuit_recover(samples, a.radius, a.delta, truth=truth)
        if not (a.resample_on_fail and rep.rank_deficient) or attempt >= a.max_resample:
            break
        attempt += 1
        log.warning("rank-deficient design matrix; resampling (attempt %d)", attempt)
        samples = draw_samples(truth, a.n_samples, a.seed + 1_000_003 * attempt)
    out = {"report": rep.to_dict(), "coefficients": c.to_dict(), "resamples": attempt}
    _emit(_json(out), a.report)


def _read_config(path):
    if not os.path.exists(path):
        alt = os.path.join(os.environ.get(CONFIG_DIR_ENV, ""), path)
        if os.environ.get(CONFIG_DIR_ENV) and os.path.exists(alt):
            path = alt
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def cmd_experiment_run(a):
    cfg = ExperimentConfig.from_dict(_read_config(a.config))
    _emit(run_experiment(cfg, a.workers), a.out)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reluriesz", description="Exact ReLU networks for Riesz expansions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log to standard error")
    sub = p.add_subparsers(dest="command", required=True)

    basis = sub.add_parser("basis", help="evaluate basis functions").add_subparsers(dest="sub", required=True)
    be = basis.add_parser("eval")
    be.add_argument("--kind", choices=["const", "cos", "sin"], required=True)
    be.add_argument("--k", type=int, nargs="+", default=[])
    be.add_argument("--x", type=float, nargs="+", required=True)
    be.set_defaults(func=cmd_basis_eval)

    lat = sub.add_parser("lattice", help="lattice points in balls").add_subparsers(dest="sub", required=True)
    for name, fn in (("count", cmd_lattice_count), ("enum", cmd_lattice_enum), ("bounds", cmd_lattice_bounds)):
        q = lat.add_parser(name)
        q.add_argument("--t", type=float, required=True)
        q.add_argument("--d", type=int, required=True)
        q.set_defaults(func=fn)
        if name != "bounds":
            q.add_argument("--cap", type=int, default=10**7)
        if name == "count":
            q.add_argument("--method", choices=["theta", "recursive", "enum"], default="theta")
        if name == "enum":
            q.add_argument("--half", action="store_true", help="only k |> 0")
            q.add_argument("--out")

    mb = sub.add_parser("mobius", help="Moebius function")
    mb.add_argument("n", type=int)
    mb.set_defaults(func=cmd_mobius)

    tr = sub.add_parser("transform", help="Fourier <-> Riesz coefficients")
    tr.add_argument("--dir", choices=["f2r", "r2f"], required=True)
    tr.add_argument("--trunc", type=int)
    tr.add_argument("--in", dest="inp", required=True)
    tr.add_argument("--out")
    tr.set_defaults(func=cmd_transform)

    gr = sub.add_parser("gram", help="Gram matrix of V_R")
    gr.add_argument("--radius", type=float, required=True)
    gr.add_argument("--dim", type=int, required=True)
    gr.add_argument("--normalized", action="store_true")
    gr.add_argument("--csv", help="write the nonzero entries here")
    gr.set_defaults(func=cmd_gram)

    net = sub.add_parser("net", help="build, evaluate and audit networks").add_subparsers(dest="sub", required=True)
    nb = net.add_parser("build")
    nb.add_argument("--arch", choices=["stacked", "inline"], default="stacked")
    nb.add_argument("--in", dest="inp", required=True)
    nb.add_argument("--out")
    nb.set_defaults(func=cmd_net_build)
    ne = net.add_parser("eval")
    ne.add_argument("--net", required=True)
    grp = ne.add_mutually_exclusive_group(required=True)
    grp.add_argument("--x", type=float, nargs="+")
    grp.add_argument("--points", help="CSV file, one point per row")
    ne.set_defaults(func=cmd_net_eval)
    nc = net.add_parser("check")
    nc.add_argument("--net", required=True)
    nc.add_argument("--points", type=int, default=1000)
    nc.add_argument("--seed", type=int, default=0)
    nc.add_argument("--tol", type=float, default=1e-9)
    nc.set_defaults(func=cmd_net_check)
    nx = net.add_parser("export")
    nx.add_argument("--net", required=True)
    nx.add_argument("--format", choices=["text", "npz"], default="text")
    nx.add_argument("--out")
    nx.set_defaults(func=cmd_net_export)

    ap = sub.add_parser("approx", help="approximation pipelines").add_subparsers(dest="kind", required=True)
    for name in ("sobolev", "barron"):
        q = ap.add_parser(name)
        q.add_argument("--s", type=float, required=True)
        q.add_argument("--eps", type=float, required=True)
        q.add_argument("--arch", choices=["stacked", "inline"], default="stacked")
        q.add_argument("--in", dest="inp", required=True)
        q.add_argument("--out", required=True)
        q.add_argument("--report")
        if name == "sobolev":
            q.add_argument("--radius", type=float, help="override R = (C_s/eps)^(1/s)")
        q.set_defaults(func=cmd_approx)

    rc = sub.add_parser("recover", help="recover coefficients from samples")
    rc.add_argument("--method", choices=["ls", "bp"], default="ls")
    rc.add_argument("--radius", type=float)
    rc.add_argument("--n-samples", type=int)
    rc.add_argument("--delta", type=float, default=1e-8)
    rc.add_argument("--seed", type=int, default=0)
    rc.add_argument("--truth")
    rc.add_argument("--report")
    rc.add_argument("--resample-on-fail", action="store_true")
    rc.add_argument("--max-resample", type=int, default=10)
    rc.add_argument("--batch", help="recovery_sweep config JSON")
    rc.add_argument("--csv", help="output CSV for --batch")
    rc.add_argument("--workers", type=int, default=1)
    rc.set_defaults(func=cmd_recover)

    ex = sub.add_parser("experiment", help="grid experiments").add_subparsers(dest="sub", required=True)
    er = ex.add_parser("run")
    er.add_argument("--config", required=True)
    er.add_argument("--out")
    er.add_argument("--workers", type=int, default=1)
    er.set_defaults(func=cmd_experiment_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except AuditFailure as exc:
        print(f"audit failed: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, NetworkFormatError, ConfigError, InfeasibleError, CapExceededError,
            OSError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
