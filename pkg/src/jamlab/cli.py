"""Command-line interface.

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.
The default master seed comes from ``$JAMLAB_SEED`` (0 if unset).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io as jio
from .core import DomainError, NumericalError, Params
from .crg import sample_crg_with_households
from .explore import explore_trace
from .mc import MODELS, ModelSpec, fmt, run_replications
from .meanfield import jamming_fraction, jamming_large_c, variance
from .rgg import sample_rgg
from .rng import RngStream
from .special import MAX_DIM, alpha_d

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_ALPHA_MISMATCH = 1e-6


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("JAMLAB_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"JAMLAB_SEED must be an integer, got {raw!r}") from None


def resolve_alpha(args, required: bool = True) -> float | None:
    """Clustering level from ``--alpha`` or ``--dim``; ``--alpha`` wins when both are given."""
    alpha = getattr(args, "alpha", None)
    dim = getattr(args, "dim", None)
    if alpha is None and dim is None:
        if required:
            raise UsageError("one of --alpha or --dim is required")
        return None
    if dim is not None:
        if not 1 <= dim <= MAX_DIM:
            raise UsageError(f"--dim must lie in [1, {MAX_DIM}]")
        a_dim = alpha_d(dim)
        if alpha is None:
            return a_dim
        if abs(alpha - a_dim) > _ALPHA_MISMATCH:
            print(f"jamlab: warning: --alpha {alpha} differs from alpha_d({dim}) = {a_dim:.9g};"
                  " using --alpha", file=sys.stderr)
    return alpha


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _table(rows: list[dict], fmt_name: str) -> str:
    if fmt_name == "json":
        clean = [{k: (float(fmt(v)) if isinstance(v, float) else v) for k, v in r.items()}
                 for r in rows]
        return json.dumps(clean, indent=2) + "\n"
    if not rows:
        return ""
    keys = list(rows[0])
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join(fmt(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys))
    return "\n".join(lines) + "\n"


def cmd_alpha(args) -> None:
    if not 1 <= args.dmax <= MAX_DIM:
        raise UsageError(f"--dmax must lie in [1, {MAX_DIM}]")
    rows = [{"d": d, "alpha_d": alpha_d(d)} for d in range(1, args.dmax + 1)]
    _emit(_table(rows, args.format), args.out)


def cmd_jam(args) -> None:
    alpha = resolve_alpha(args)
    p = Params(1, args.c, alpha, args.dim or 2)
    row = {"c": p.c, "alpha": p.alpha, "jstar": jamming_fraction(p, args.tol)}
    if args.var:
        row["vstar"] = variance(p, max(args.tol, 1e-10))
    row["large_c"] = jamming_large_c(p)
    row["tol"] = args.tol
    _emit(_table([row], args.format), args.out)


def _model_params(args, c: float) -> Params:
    if args.model == "rgg":
        if args.dim is None:
            raise UsageError("--model rgg needs --dim")
        return Params(args.n, c, 0.0, args.dim)
    alpha = resolve_alpha(args)
    return Params(args.n, c, alpha, args.dim or 2)


def cmd_simulate(args) -> None:
    seed = args.seed if args.seed is not None else default_seed()
    p = _model_params(args, args.c)
    summary = run_replications(ModelSpec(args.model, p), args.reps, seed, args.jobs, args.bins)
    if args.out is None:
        sys.stdout.write(summary.to_json())
        return
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.json").write_text(summary.to_json(), encoding="utf-8", newline="\n")
    Path(f"{prefix}.csv").write_text(summary.replications_csv(), encoding="utf-8", newline="\n")


def cmd_sweep(args) -> None:
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.cmin < 0 or args.cmax < args.cmin:
        raise UsageError("need 0 <= --cmin <= --cmax")
    seed = args.seed if args.seed is not None else default_seed()
    if args.model == "rgg":
        alpha_theory = resolve_alpha(args)
    cs = np.linspace(args.cmin, args.cmax, args.steps) if args.steps > 1 else np.array([args.cmin])
    rows = []
    for c in cs:
        p = _model_params(args, float(c))
        a = alpha_theory if args.model == "rgg" else p.alpha
        jstar = jamming_fraction(Params(1, float(c), a, p.d))
        s = run_replications(ModelSpec(args.model, p), args.reps, seed, args.jobs)
        rows.append({"c": float(c), "jstar": jstar, "sim_mean": s.mean, "sim_stderr": s.stderr})
    _emit(_table(rows, args.format), args.out)


def cmd_trace(args) -> None:
    seed = args.seed if args.seed is not None else default_seed()
    p = Params(args.n, args.c, resolve_alpha(args), args.dim or 2)
    tr = explore_trace(p, RngStream(seed, args.index))
    lines = ["t,X,Y", *(f"{t},{x},{y}" for t, x, y in tr)]
    _emit("\n".join(lines) + "\n", args.out)


def cmd_graph(args) -> None:
    seed = args.seed if args.seed is not None else default_seed()
    p = _model_params(args, args.c)
    rng = RngStream(seed, args.index)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    if args.model == "rgg":
        g = sample_rgg(p, rng)
        jio.write_positions(g, f"{prefix}.positions.csv")
    else:
        g, households = sample_crg_with_households(p, rng)
        jio.write_households(households, f"{prefix}.households.csv")
    jio.write_edgelist(g, f"{prefix}.edges")


def _add_alpha_dim(sp, dim_help="dimension; sets alpha = alpha_d unless --alpha is given"):
    sp.add_argument("--alpha", type=float, help="clustering level in [0, 1]")
    sp.add_argument("--dim", type=int, help=dim_help)


def _add_sim(sp):
    sp.add_argument("--n", type=int, required=True, help="number of vertices")
    sp.add_argument("--reps", type=int, default=150)
    sp.add_argument("--seed", type=int, help="master seed (default $JAMLAB_SEED or 0)")
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamlab", description="RSA jamming on random geometric and clustered random graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("alpha", help="table of alpha_d")
    sp.add_argument("--dmax", type=int, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_alpha)

    sp = sub.add_parser("jam", help="mean-field jamming fraction (and variance)")
    sp.add_argument("--c", type=float, required=True)
    _add_alpha_dim(sp)
    sp.add_argument("--var", action="store_true", help="also compute V*")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_jam)

    sp = sub.add_parser("simulate", help="Monte Carlo replications of one model")
    sp.add_argument("--model", choices=MODELS, required=True)
    sp.add_argument("--c", type=float, required=True)
    _add_alpha_dim(sp)
    _add_sim(sp)
    sp.add_argument("--bins", default="fd", help="histogram bins: an integer or a numpy rule")
    sp.add_argument("--out", help="output prefix; writes PREFIX.json and PREFIX.csv")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="J* and simulated means over a range of c")
    sp.add_argument("--model", choices=MODELS, required=True)
    sp.add_argument("--cmin", type=float, default=0.0)
    sp.add_argument("--cmax", type=float, default=30.0)
    sp.add_argument("--steps", type=int, default=31)
    _add_alpha_dim(sp)
    _add_sim(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("trace", help="per-step (t, X, Y) trace of the exploration chain")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=float, required=True)
    _add_alpha_dim(sp)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--index", type=int, default=0, help="stream index")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("graph", help="dump one sampled graph")
    sp.add_argument("--model", choices=("rgg", "crg"), required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=float, required=True)
    _add_alpha_dim(sp)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--index", type=int, default=0, help="stream index")
    sp.add_argument("--out", required=True, help="output prefix")
    sp.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "bins") and isinstance(args.bins, str) and args.bins.isdigit():
        args.bins = int(args.bins)
    try:
        args.func(args)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"jamlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"jamlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
