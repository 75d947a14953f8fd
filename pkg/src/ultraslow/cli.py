"""Command-line front end: tables (CSV/JSON) and quick SVG plots.

Exit codes: 0 success, 1 verification failure, 2 bad flags or values.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .config import DEFAULT_CONFIG
from .errors import UltraslowError

FORMATS = ("csv", "json", "svg")


# ------------------------------------------------------------- helpers

def _grid(args) -> np.ndarray:
    if args.grid is None:
        return np.asarray(args.t if args.t is not None else args.t_default, dtype=float)
    lo, hi, n = args.grid
    n = int(n)
    if args.log:
        return np.logspace(math.log10(lo), math.log10(hi), n)
    return np.linspace(lo, hi, n)


def _add_grid(p: argparse.ArgumentParser, default=(1.0,)) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", type=float, nargs="+", help="explicit evaluation times")
    g.add_argument("--grid", type=float, nargs=3, metavar=("LO", "HI", "N"), help="evenly spaced grid")
    p.add_argument("--log", action="store_true", help="space --grid logarithmically")
    p.set_defaults(t_default=list(default))


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--output", "-o", default="-", help="file path or - for stdout")


def _add_prab(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--lam", type=float, default=1.0)


def _kernel(args):
    from .kernels import MemoryKernel

    if args.kernel in ("k1", "M1"):
        return MemoryKernel.distributed(args.B)
    return MemoryKernel.distributed_prabhakar(args.alpha, args.gamma, args.lam, args.B)


def _emit(args, columns: list[str], rows: list[list], *, title: str = "", logx: bool = False,
          logy: bool = False, extra: dict | None = None) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([f"{v:.16g}" if isinstance(v, float) else v for v in r])
        text = buf.getvalue()
    elif args.format == "json":
        payload = {"columns": columns, "rows": rows}
        if extra:
            payload.update(extra)
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = _svg(columns, rows, title, logx, logy)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def _svg(columns, rows, title, logx, logy) -> str:
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "ultraslow"
    import matplotlib.pyplot as plt

    data = np.array([[float(v) for v in r[:2]] for r in rows])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(data[:, 0], data[:, 1], lw=1.2)
    ax.set_xscale("log" if logx else "linear")
    ax.set_yscale("log" if logy and np.all(data[:, 1] > 0) else "linear")
    ax.set_xlabel(columns[0])
    ax.set_ylabel(columns[1])
    if title:
        ax.set_title(title)
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


# --------------------------------------------------------- subcommands

def cmd_eval(args) -> int:
    from .specfun import PrabhakarParams, ein, exp_integral_e1, exp_integral_ei, mittag_leffler_3p, prabhakar_e
    from .volterra import VPArgs, VolterraArgs, nu, volterra_mu, vp_epsilon, vp_epsilon_gen

    cfg = DEFAULT_CONFIG
    if args.max_terms:
        cfg = cfg.with_overrides(max_terms=args.max_terms)
    rows = []
    for t in _grid(args):
        f = args.func
        if f == "ml":
            r = mittag_leffler_3p(PrabhakarParams(args.alpha, args.beta, args.gamma), t, cfg)
        elif f == "prabhakar":
            r = prabhakar_e(PrabhakarParams(args.alpha, args.beta, args.gamma, args.lam), t, cfg)
        elif f == "mu":
            r = volterra_mu(VolterraArgs(t, args.beta, args.p))
        elif f == "nu":
            r = nu(t, args.p)
        elif f == "epsilon":
            r = vp_epsilon(VPArgs.of(args.alpha, args.gamma, args.lam, args.p), t, args.route or "u_integral")
        elif f == "epsilon-gen":
            r = vp_epsilon_gen(VPArgs.of(args.alpha, args.gamma, args.lam, args.p, args.beta), t,
                               args.route or "u_integral")
        elif f == "ei":
            r = exp_integral_ei(t)
        elif f == "e1":
            r = exp_integral_e1(t)
        else:
            r = ein(t)
        val, err = (r.value, r.abs_err) if hasattr(r, "abs_err") else (float(r), 0.0)
        rows.append([float(t), float(val), float(err)])
    _emit(args, ["t", "value", "abs_err"], rows, title=args.func)
    return 0


def cmd_kernel(args) -> int:
    from . import kernels as K

    rows = []
    for t in _grid(args):
        name = args.kernel
        a, g, lam = args.alpha, args.gamma, args.lam
        if name == "k1":
            r = K.k1_time(t)
        elif name == "M1":
            v = K.m1_time(t)
            r = None
        elif name == "k2":
            r = K.k2_time(a, g, lam, t, args.route or "auto")
        else:
            r = K.m2_time(a, g, lam, t, args.route or "auto")
        if r is None:
            rows.append([float(t), v, 0.0])
        else:
            rows.append([float(t), r.value, r.abs_err])
    _emit(args, ["t", "value", "abs_err"], rows, title=args.kernel, logx=args.log)
    return 0


def cmd_msd(args) -> int:
    from .moments import msd1, msd2

    rows = []
    for t in _grid(args):
        if args.kernel == "k1":
            v = msd1(t, args.B)
            rows.append([float(t), v, 1e-15 * abs(v)])
        else:
            r = msd2(args.alpha, args.gamma, args.lam, t, args.B, args.route)
            rows.append([float(t), r.value, r.abs_err])
    _emit(args, ["t", "value", "abs_err"], rows, title=f"MSD {args.kernel}", logx=args.log)
    return 0


def cmd_moments(args) -> int:
    from .moments import MomentRequest, kurtosis, moment_even

    kern = _kernel(args)
    rows = []
    for t in _grid(args):
        r = moment_even(MomentRequest(kern, args.order, float(t), args.route))
        row = [float(t), r.value, r.abs_err]
        if args.kurtosis:
            row.append(kurtosis(kern, float(t)).value)
        rows.append(row)
    cols = ["t", "value", "abs_err"] + (["kurtosis"] if args.kurtosis else [])
    _emit(args, cols, rows, title=f"<x^{args.order}>")
    return 0


def cmd_pdf(args) -> int:
    from .pdf import pdf_ilt, pdf_series

    kern = _kernel(args)
    xs = np.linspace(-args.x_max, args.x_max, args.nx)
    t = float(args.time)
    vals = pdf_ilt(xs, t, kern) if args.route == "ilt" else pdf_series(xs, t, kern)[0]
    _emit(args, ["x", "p"], [[float(x), float(v)] for x, v in zip(xs, vals)], title=f"p(x, {t:g})")
    return 0


def cmd_spectral(args) -> int:
    from .volterra import spectral_integral, spectral_kernel_tilde

    a, g = args.alpha, args.gamma
    p = a * g if args.p == "auto" else float(args.p)
    r = np.logspace(math.log10(args.r_min), math.log10(args.r_max), args.n)
    vals = 2.0 ** g * spectral_kernel_tilde(a, g, p, r)
    extra = {}
    if args.integrate:
        v, e = spectral_integral(a, g, p)
        extra = {"integral": 2.0 ** g * v, "abs_err": 2.0 ** g * e}
        sys.stderr.write(f"integral of 2^gamma K~ = {2.0 ** g * v:.12f} (err {2.0 ** g * e:.2g})\n")
    _emit(args, ["r", "2^gamma K~"], [[float(x), float(v)] for x, v in zip(r, vals)],
          title=f"alpha={a:g} gamma={g:g} p={p:g}", logx=True, extra=extra)
    return 0


def cmd_asymptote(args) -> int:
    from .kernels import tauberian_asymptote

    form = tauberian_asymptote(args.ident, args.regime, alpha=args.alpha, gamma=args.gamma,
                               lam=args.lam, B=args.B)
    rows = [[float(t), float(form.expression(t))] for t in _grid(args)]
    _emit(args, ["t", "asymptote"], rows, title=form.description, extra={"description": form.description})
    return 0


def cmd_verify(args) -> int:
    from .suite import as_rows, run_all

    rows = as_rows(run_all())
    failed = [r for r in rows if r["status"] != "PASS"]
    if args.format == "json":
        text = json.dumps({"checks": rows, "failed": len(failed)}, indent=2) + "\n"
    else:
        lines = [f"{'check':32s} {'value':>12s} {'tol':>9s}  status"]
        for r in rows:
            lines.append(f"{r['check']:32s} {r['value']:12.3e} {r['tol']:9.1e}  {r['status']}")
        lines.append(f"{len(rows) - len(failed)}/{len(rows)} checks passed")
        text = "\n".join(lines) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return 1 if failed else 0


def cmd_fdsolve(args) -> int:
    from .fdoracle import GridSpec, default_grid, solve_fp_integral

    kern = _kernel(args)
    grid = default_grid(kern, args.t_final, args.nx, args.nt)
    if args.x_half_width:
        grid = GridSpec(args.x_half_width, args.nx, args.t_final, args.nt)
    sol = solve_fp_integral(kern, grid)
    if args.field_csv:
        sol.to_csv(args.field_csv, every=max(1, args.nt // 100))
    step = max(1, args.nt // 20)
    rows = [[float(sol.t[j]), float(sol.msd[j]), float(sol.mass[j])] for j in range(0, args.nt + 1, step)]
    _emit(args, ["t", "msd", "mass"], rows, title="finite-difference MSD")
    return 0


# -------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ultraslow", description="Distributed-order Prabhakar diffusion toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--config", help="TOML file with defaults (flags beat config)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="special functions")
    p.add_argument("--func", required=True,
                   choices=["ml", "prabhakar", "mu", "nu", "epsilon", "epsilon-gen", "ei", "e1", "ein"])
    _add_prab(p)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--route")
    p.add_argument("--max-terms", type=int)
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func_=cmd_eval)

    p = sub.add_parser("kernel", help="memory kernels and Sonnine partners")
    p.add_argument("--kernel", required=True, choices=["k1", "k2", "M1", "M2"])
    _add_prab(p)
    p.add_argument("--route")
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func_=cmd_kernel)

    p = sub.add_parser("msd", help="mean squared displacement")
    p.add_argument("--kernel", choices=["k1", "k2"], default="k1")
    _add_prab(p)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--route", choices=["series", "quadrature_oracle"], default="series")
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func_=cmd_msd)

    p = sub.add_parser("moments", help="even moments")
    p.add_argument("--kernel", choices=["k1", "k2"], default="k1")
    _add_prab(p)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--route", choices=["closed_form", "ilt_oracle", "quadrature_oracle"], default="ilt_oracle")
    p.add_argument("--kurtosis", action="store_true")
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func_=cmd_moments)

    p = sub.add_parser("pdf", help="probability density p(x, t)")
    p.add_argument("--kernel", choices=["k1", "k2"], default="k1")
    _add_prab(p)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--x-max", type=float, default=6.0)
    p.add_argument("--nx", type=int, default=121)
    p.add_argument("--route", choices=["ilt", "series"], default="ilt")
    _add_output(p)
    p.set_defaults(func_=cmd_pdf)

    p = sub.add_parser("spectral", help="spectral kernel 2^gamma K~(r)")
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--p", default="auto", help="'auto' means p = alpha*gamma")
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--r-max", type=float, default=1e3)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--integrate", action="store_true")
    _add_output(p)
    p.set_defaults(func_=cmd_spectral)

    p = sub.add_parser("asymptote", help="Tauberian leading-order forms")
    p.add_argument("--ident", required=True, choices=["k1", "k2", "M1", "M2", "msd1", "msd2"])
    p.add_argument("--regime", required=True, choices=["short", "long"])
    _add_prab(p)
    p.add_argument("--B", type=float, default=1.0)
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func_=cmd_asymptote)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func_=cmd_verify)

    p = sub.add_parser("fdsolve", help="finite-difference oracle")
    p.add_argument("--kernel", choices=["k1", "k2"], default="k1")
    _add_prab(p)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=401)
    p.add_argument("--nt", type=int, default=2000)
    p.add_argument("--x-half-width", type=float)
    p.add_argument("--field-csv", help="dump the space-time field")
    _add_output(p)
    p.set_defaults(func_=cmd_fdsolve)
    for sp in sub.choices.values():
        sp.add_argument("--config", help=argparse.SUPPRESS)
    return ap


def _load_config(path: str) -> dict:
    try:
        import tomllib  # type: ignore[import-not-found]
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _apply_config(ap: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    data = _load_config(known.config)
    sub_action = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    shared = {k.replace("-", "_"): v for k, v in data.items() if not isinstance(v, dict)}
    for name, sp in sub_action.choices.items():
        dests = {a.dest for a in sp._actions}
        section = {k.replace("-", "_"): v for k, v in data.get(name, {}).items()}
        vals = {k: v for k, v in {**shared, **section}.items() if k in dests}
        unknown = set(section) - dests
        if unknown:
            raise UltraslowError(f"unknown config keys for {name}: {sorted(unknown)}")
        sp.set_defaults(**vals)


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
    except (OSError, ValueError, UltraslowError) as exc:
        sys.stderr.write(f"ultraslow: config error: {exc}\n")
        return 2
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func_(args)
    except (UltraslowError, ValueError) as exc:
        sys.stderr.write(f"ultraslow: {type(exc).__name__}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
