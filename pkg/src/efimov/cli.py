"""Command-line front end: every computation as a reproducible CSV/JSON batch run.

Each output starts with the fully resolved configuration so a file can be
regenerated from its own header. Exit codes: 0 success, 2 usage or domain
error, 3 resource cap exceeded, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .constants import efimov_constant, channel_critical_mass, first_crossing_k1, lower_bound_c1, upper_bound_c2
from .errors import ConvergenceError, DomainError, ResourceCapError
from .kernels import ChannelSymbol, symbol_hat, symbol_upper_bound
from .params import critical_mass, lambda_of_m, make_params
from .spectral import (
    Discretization,
    check_map_identity,
    convergence_study,
    prefactor_identity,
    random_identity_samples,
    r_of_z,
    run_counting,
)

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_NONCONV = 0, 2, 3, 4


class Output:
    """A table of rows plus scalar summary fields, rendered as CSV or JSON."""

    def __init__(self, columns, rows, summary=None, extra=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.summary = dict(summary or {})
        self.extra = dict(extra or {})


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, list):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def render(out: Output, command: str, config: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "version": __version__,
            "config": config,
            "result": {k: _jsonable(v) for k, v in out.summary.items()},
            "columns": out.columns,
            "rows": [[_jsonable(v) for v in r] for r in out.rows],
        }
        doc["result"].update(out.extra)
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# efimov {command} (version {__version__}, schema {SCHEMA_VERSION})\n")
    for k, v in config.items():
        buf.write(f"# config.{k}={_fmt(v)}\n")
    for k, v in out.summary.items():
        buf.write(f"# result.{k}={_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(out.columns)
    for r in out.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def cmd_critical_mass(args) -> Output:
    ms = critical_mass()
    res = lambda_of_m(ms) - 1.0
    summary = {"m_star": ms, "inverse": 1.0 / ms, "residual": res}
    return Output(list(summary), [list(summary.values())], summary)


def cmd_lambda(args) -> Output:
    p = make_params(args.mass)
    summary = {"m": p.m, "lambda": p.lambda_m, "mu": p.mu, "n_red": p.n_red, "b": p.b,
               "c_norm": p.c_norm, "alpha": p.alpha, "beta": p.beta, "g": p.g, "l0": p.l0}
    return Output(list(summary), [list(summary.values())], summary)


def cmd_constant(args) -> Output:
    p = make_params(args.mass)
    rep = efimov_constant(p, args.quad_order)
    head = [rep.m, rep.c_of_m, rep.c1, rep.c2]
    rows = [head + [c.l, c.measure, c.contribution] for c in rep.per_channel]
    if not rows:
        rows = [head + [None, 0.0, 0.0]]
    summary = {"m": rep.m, "c": rep.c_of_m, "c1": rep.c1, "c2": rep.c2, "l_max_used": rep.l_max_used}
    return Output(["m", "c", "c1", "c2", "l", "measure", "contribution"], rows, summary,
                  {"notes": rep.notes})


def cmd_bounds(args) -> Output:
    p = make_params(args.mass)
    summary = {"m": p.m, "c1": lower_bound_c1(p, args.quad_order), "c2": upper_bound_c2(p),
               "k1": first_crossing_k1(p, args.quad_order), "l0": p.l0, "lambda": p.lambda_m}
    return Output(list(summary), [list(summary.values())], summary)


def cmd_channel_mass(args) -> Output:
    ml = channel_critical_mass(args.l, args.quad_order)
    sym = ChannelSymbol(make_params(ml), args.l, args.quad_order)
    res = math.sqrt(2.0 * math.pi) * symbol_hat(sym, 0.0) - 1.0
    summary = {"l": args.l, "m_l_star": ml, "inverse": 1.0 / ml, "residual": res}
    return Output(list(summary), [list(summary.values())], summary)


def cmd_kernel(args) -> Output:
    if args.steps < 1:
        raise DomainError("--steps must be at least 1")
    if args.k_max < args.k_min:
        raise DomainError("--k-max must not be smaller than --k-min")
    p = make_params(args.mass)
    sym = ChannelSymbol(p, args.l, args.quad_order)
    ks = np.linspace(args.k_min, args.k_max, args.steps) if args.steps > 1 else np.array([args.k_min])
    vals = symbol_hat(sym, ks)
    rows = []
    for k, v in zip(ks, vals):
        ub = symbol_upper_bound(p, args.l, abs(k)) if args.l % 2 == 1 else None
        rows.append([float(k), float(v), ub])
    return Output(["k", "symbol", "upper_bound"], rows, {"m": p.m, "l": args.l})


def cmd_spectrum(args) -> Output:
    p = make_params(args.mass)
    disc = Discretization(args.big_r, args.grid_n, args.rule)
    run = run_counting(p, disc, args.lambda_thresh, args.l_max, args.quad_order)
    rows = [[c.l, c.count, (2 * c.l + 1) * c.count, c.skipped, c.path, c.near_threshold]
            for c in run.per_channel_counts]
    summary = {"m": p.m, "total": run.total, "ratio": run.ratio}
    return Output(["l", "count", "weighted", "skipped", "path", "near_threshold"], rows, summary,
                  {"warnings": run.warnings})


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_converge(args) -> Output:
    p = make_params(args.mass)
    tab = convergence_study(p, args.l, args.lambda_thresh, args.r_list, args.nodes_per_unit,
                            args.quad_order)
    rows = [[r.big_r, r.grid_n, r.count, r.ratio, r.predicted] for r in tab.rows]
    summary = {"m": p.m, "l": tab.l, "predicted": tab.predicted, "monotone": tab.monotone,
               "relative_error_last": tab.relative_error_last}
    return Output(["R", "grid_n", "count", "ratio", "predicted"], rows, summary)


def cmd_check_identity(args) -> Output:
    if args.samples < 1:
        raise DomainError("--samples must be at least 1")
    p = make_params(args.mass)
    samples = random_identity_samples(args.z, args.samples, args.seed)
    err = check_map_identity(p, args.z, samples)
    lhs, rhs = prefactor_identity(p)
    summary = {"m": p.m, "z": args.z, "big_r": r_of_z(args.z), "samples": args.samples,
               "max_rel_error": err, "prefactor": lhs, "b": rhs,
               "prefactor_rel_error": abs(lhs - rhs) / rhs}
    return Output(list(summary), [list(summary.values())], summary)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--quad-order", type=int, default=None,
                        help="Gauss-Legendre order per panel (default max(64, 4(l+1)))")
    parser.add_argument("--seed", type=int, default=0,
                        help="random seed (used only by check-identity sampling)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="efimov", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        _common(sp)
        return sp

    add("critical-mass", cmd_critical_mass, "critical mass m* with Lambda(m*) = 1")
    add("lambda", cmd_lambda, "closed-form constants at a mass").add_argument(
        "--mass", type=float, required=True)
    add("constant", cmd_constant, "Efimov constant C(m) with bounds and channels").add_argument(
        "--mass", type=float, required=True)
    add("bounds", cmd_bounds, "lower and upper bounds C1(m), C2(m)").add_argument(
        "--mass", type=float, required=True)
    add("channel-mass", cmd_channel_mass, "channel critical mass m_l*").add_argument(
        "--l", type=int, required=True)

    sp = add("kernel", cmd_kernel, "channel symbol and its exponential bound on a k grid")
    sp.add_argument("--mass", type=float, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--k-min", type=float, default=0.0)
    sp.add_argument("--k-max", type=float, default=10.0)
    sp.add_argument("--steps", type=int, default=101)

    sp = add("spectrum", cmd_spectrum, "per-channel eigenvalue counts of the truncated operator")
    sp.add_argument("--mass", type=float, required=True)
    sp.add_argument("--big-r", type=float, required=True)
    sp.add_argument("--grid-n", type=int, required=True)
    sp.add_argument("--lambda", dest="lambda_thresh", type=float, default=1.0)
    sp.add_argument("--l-max", type=int, default=7)
    sp.add_argument("--rule", choices=("uniform-midpoint", "gauss-panel"), default="uniform-midpoint")

    sp = add("converge", cmd_converge, "count/R against the level-set prediction over R")
    sp.add_argument("--mass", type=float, required=True)
    sp.add_argument("--l", type=int, default=1)
    sp.add_argument("--lambda", dest="lambda_thresh", type=float, default=1.0)
    sp.add_argument("--r-list", type=_float_list, default=[10.0, 20.0, 40.0, 60.0])
    sp.add_argument("--nodes-per-unit", type=int, default=40)

    sp = add("check-identity", cmd_check_identity, "pointwise check of the log-radial kernel map")
    sp.add_argument("--mass", type=float, required=True)
    sp.add_argument("--z", type=float, default=-1e-6)
    sp.add_argument("--samples", type=int, default=1000)
    return parser


def _resolved_config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in cfg.items()}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except DomainError as exc:
        print(f"efimov {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"efimov {args.command}: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ConvergenceError as exc:
        print(f"efimov {args.command}: no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    text = render(out, args.command, _resolved_config(args), args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
