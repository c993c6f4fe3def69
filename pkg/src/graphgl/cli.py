"""Command-line entry point: ``graphgl <subcommand> ...``.

Exit codes: 0 success, 2 configuration or input error, 3 numerical abort.
Outputs go to ``<out>/<subcommand>/<name>/`` (``report.csv`` or
``trace.csv``, ``frames/``, ``config.echo``).
"""
from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime
from pathlib import Path

import numpy as np

from . import functionals as fn
from . import io
from .flows import FlowConfig, FlowDivergence, random_initial, run_flow
from .harness import (
    alpha_counterexample,
    brute_force_min_cut,
    minimizer_shape_check,
    noncompactness_demo,
    recovery_profile_check,
    sweep_k_pointwise,
)
from .nlm import PatchWeightSpec, g_energy, weight_sup_error

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

FLOW_KEYS = {
    "N": int, "eps": float, "lambda": float, "dt": float, "steps": int, "r": float,
    "constraint": str, "seed": int, "f": str, "snapshot_every": int, "u0": str,
}


class ConfigError(Exception):
    pass


def smooth_test_field(x, y):
    return 0.5 + 0.25 * np.sin(2 * np.pi * x) + 0.25 * np.cos(2 * np.pi * y)


def smooth_test_gradient(x, y):
    return 0.5 * np.pi * np.cos(2 * np.pi * x), -0.5 * np.pi * np.sin(2 * np.pi * y)


def _out_dir(args, sub):
    name = args.name or datetime.now().strftime("%Y%m%d-%H%M%S")
    path = Path(args.out) / sub / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def _echo(path, args, extra=None):
    items = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    if extra:
        items.update(extra)
    lines = [f"{k} = {v}" for k, v in items.items()]
    (path / "config.echo").write_text("\n".join(lines) + "\n")


def _emit(args, sub, columns, rows, extra=None):
    out = _out_dir(args, sub)
    io.write_report_csv(out / "report.csv", columns, rows)
    _echo(out, args, extra)
    return out


def cmd_flow(args):
    raw = {}
    base = Path(".")
    if args.config:
        raw = io.read_config(args.config, allowed=FLOW_KEYS)
        base = Path(args.config).parent
    for key in FLOW_KEYS:
        val = getattr(args, "lam" if key == "lambda" else key, None)
        if val is not None:
            raw[key] = str(val)
    try:
        vals = {k: FLOW_KEYS[k](v) for k, v in raw.items()}
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    for key in ("eps", "dt", "steps"):
        if key not in vals:
            raise ConfigError(f"flow config is missing {key!r}")
    constraint = vals.get("constraint", "fidelity")
    f = None
    if "f" in vals:
        f = io.read_grid(base / vals["f"])
    u0 = io.read_grid(base / vals["u0"]) if "u0" in vals else None
    N = vals.get("N")
    if N is None:
        ref = f if f is not None else u0
        if ref is None:
            raise ConfigError("flow needs N, f or u0 to fix the grid size")
        N = ref.shape[0]
    for arr, label in ((f, "f"), (u0, "u0")):
        if arr is not None and arr.shape != (N, N):
            raise ConfigError(f"{label} is {arr.shape[0]}x{arr.shape[1]} but N={N}")
    if constraint == "fidelity" and f is None:
        raise ConfigError("fidelity flow needs f = <path>")
    try:
        cfg = FlowConfig(eps=vals["eps"], dt=vals["dt"], steps=vals["steps"],
                         lam=vals.get("lambda", 0.0), r=vals.get("r", 0.0),
                         constraint=constraint, seed=vals.get("seed", 0),
                         snapshot_every=vals.get("snapshot_every", 0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if u0 is None:
        u0 = random_initial((N, N), cfg.seed)
    trace = run_flow(u0, f, cfg)
    out = _out_dir(args, "flow")
    io.write_report_csv(out / "trace.csv", ("step", "time", "energy", "mass", "max_update"),
                        trace.records)
    if trace.snapshots:
        frames = out / "frames"
        frames.mkdir(exist_ok=True)
        for n, snap in trace.snapshots:
            io.write_pgm(frames / f"{n:04d}.pgm", snap)
            io.write_grid_csv(frames / f"{n:04d}.csv", snap)
    (out / "config.echo").write_text("\n".join(f"{k} = {v}" for k, v in sorted(raw.items())) + "\n")
    print(f"final energy {io.fmt(trace.records[-1][2])}; wrote {out}")
    return EXIT_OK


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ConfigError(f"--{name.replace('_', '-')} is required for functional {args.functional!r}")


def cmd_energy(args):
    t0 = time.perf_counter()
    kind = args.functional
    if kind in ("f", "f0"):
        _need(args, "graph", "labels")
        g = io.read_graph(args.graph)
        u = io.read_vertex_csv(args.labels)
        if u.shape != (g.m,):
            raise ConfigError(f"labels have {u.size} values, graph has m={g.m}")
        if kind == "f":
            _need(args, "eps")
            value, param = fn.f_eps(g, u, args.eps, args.chi), args.eps
        else:
            value, param = fn.f_zero(g, u, args.chi), ""
        N = g.m
    else:
        _need(args, "grid")
        u = io.read_grid(args.grid)
        N = u.shape[0]
        if kind == "h0":
            value, param = fn.h_zero(u), ""
        elif kind == "k_inf0":
            value, param = fn.k_inf_zero(u), ""
        elif kind in ("h", "k"):
            _need(args, "eps")
            func = fn.h_energy if kind == "h" else fn.k_energy
            value, param = func(u, args.eps), args.eps
        elif kind in ("h_alpha", "k_alpha"):
            _need(args, "alpha")
            func = fn.h_alpha if kind == "h_alpha" else fn.k_alpha
            value, param = func(u, args.alpha), args.alpha
        elif kind == "g":
            _need(args, "phi", "L", "sigma")
            spec = PatchWeightSpec(io.read_grid(args.phi), args.L, args.sigma)
            value, param = g_energy(u, spec), args.sigma
        else:
            raise ConfigError(f"unknown functional {kind!r}")
    print(repr(float(value)))
    if args.name or args.write:
        row = [kind, N, param, value]
        cols = ["functional", "N", "param", "value"]
        if args.timing:
            cols.append("seconds")
            row.append(time.perf_counter() - t0)
        _emit(args, "energy", cols, [row])
    return EXIT_OK


def cmd_gamma_sweep(args):
    Ns = args.N
    if args.kind == "k-pointwise":
        rep = sweep_k_pointwise(smooth_test_field, args.eps, Ns, grad=smooth_test_gradient)
    elif args.kind == "alpha":
        rep = alpha_counterexample(Ns, args.alpha)
    else:
        eps_list = args.eps_list or [10.0 / n for n in Ns]
        rep = recovery_profile_check(eps_list, Ns)
    extra = {}
    if len(rep.rows) >= 3 and args.kind == "k-pointwise":
        slope, resid = rep.fit()
        extra = {"slope": io.fmt(slope), "residual": io.fmt(resid)}
        print(f"fitted slope {slope:.4f} (residual {resid:.2e})")
    for row in rep.rows:
        print(", ".join(io.fmt(v) for v in row))
    _emit(args, "gamma-sweep", rep.columns, rep.rows, extra)
    return EXIT_OK


def cmd_shapes(args):
    rec = minimizer_shape_check(args.N, args.M)
    print(f"square {rec.square_energy!r}")
    print(f"band {rec.band_energy!r}")
    print(f"winner {rec.winner}")
    if args.name or args.write:
        _emit(args, "shapes", ("N", "M", "K", "square", "band", "winner"),
              [(rec.N, str(rec.M), rec.K, rec.square_energy, rec.band_energy, rec.winner)])
    return EXIT_OK


def cmd_nlm_weights(args):
    rows = []
    for N in args.N:
        t0 = time.perf_counter()
        err = weight_sup_error(smooth_test_field, N, args.kind, L=args.L, sigma=args.sigma,
                               ell=args.ell, c=args.c, limit=args.limit, seed=args.seed)
        row = [N, err]
        if args.timing:
            row.append(time.perf_counter() - t0)
        rows.append(row)
        print(", ".join(io.fmt(v) for v in row))
    cols = ["N", "sup_error"] + (["seconds"] if args.timing else [])
    _emit(args, "nlm-weights", cols, rows)
    return EXIT_OK


def cmd_mincut(args):
    g = io.read_graph(args.graph)
    lab, energy = brute_force_min_cut(g, args.M, args.chi)
    labels = "".join(str(int(v)) for v in lab)
    print(f"labeling {labels}")
    print(f"energy {energy!r}")
    if args.name or args.write:
        _emit(args, "mincut-oracle", ("labeling", "energy"), [(labels, energy)])
    return EXIT_OK


def cmd_noncompact(args):
    rep = noncompactness_demo(args.N)
    for row in rep.rows:
        print(", ".join(io.fmt(v) for v in row))
    _emit(args, "noncompact", rep.columns, rep.rows)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="graphgl", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output root directory")
    common.add_argument("--name", help="run name (default: timestamp)")
    common.add_argument("--timing", action="store_true",
                        help="add wall-time columns (makes reports non-reproducible)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("flow", parents=[common], help="Allen-Cahn gradient flow on the grid")
    s.add_argument("--config")
    s.add_argument("--N", type=int)
    s.add_argument("--eps", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--dt", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--r", type=float)
    s.add_argument("--constraint", choices=("fidelity", "mass", "none"))
    s.add_argument("--seed", type=int)
    s.add_argument("--f")
    s.add_argument("--u0")
    s.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    s.set_defaults(func=cmd_flow)

    s = sub.add_parser("energy", parents=[common], help="evaluate one energy")
    s.add_argument("--functional", required=True,
                   choices=("f", "f0", "h", "h0", "h_alpha", "k", "k_alpha", "k_inf0", "g"))
    s.add_argument("--grid")
    s.add_argument("--graph")
    s.add_argument("--labels")
    s.add_argument("--eps", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--chi", type=float, default=0.5)
    s.add_argument("--phi")
    s.add_argument("--L", type=int)
    s.add_argument("--sigma", type=float)
    s.add_argument("--write", action="store_true", help="also write report.csv")
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("gamma-sweep", parents=[common], help="refinement sweeps")
    s.add_argument("--kind", choices=("k-pointwise", "alpha", "recovery"), default="k-pointwise")
    s.add_argument("--N", type=int, nargs="+", default=[16, 32, 64, 128])
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--eps-list", dest="eps_list", type=float, nargs="+")
    s.add_argument("--alpha", type=float, default=2.0)
    s.set_defaults(func=cmd_gamma_sweep)

    s = sub.add_parser("shapes", parents=[common], help="square vs band minimizer check")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--M", type=float, required=True)
    s.add_argument("--write", action="store_true")
    s.set_defaults(func=cmd_shapes)

    s = sub.add_parser("nlm-weights", parents=[common], help="patch-weight convergence sweep")
    s.add_argument("--N", type=int, nargs="+", default=[16, 32, 64, 128])
    s.add_argument("--kind", choices=("L", "ell"), default="L")
    s.add_argument("--L", type=int, default=1)
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--ell", type=float)
    s.add_argument("--c", type=float)
    s.add_argument("--limit", choices=("consistent", "written"), default="consistent")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_nlm_weights)

    s = sub.add_parser("mincut-oracle", parents=[common], help="brute-force minimal cut")
    s.add_argument("--graph", required=True)
    s.add_argument("--M", type=float)
    s.add_argument("--chi", type=float, default=0.5)
    s.add_argument("--write", action="store_true")
    s.set_defaults(func=cmd_mincut)

    s = sub.add_parser("noncompact", parents=[common], help="checkerboard non-compactness demo")
    s.add_argument("--N", type=int, nargs="+", default=[4, 8, 16])
    s.set_defaults(func=cmd_noncompact)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except FlowDivergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FloatingPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
