"""Command-line interface: ``framesub {bounds,subsample,nodes,recover,experiment}``.

Exit codes: 0 success, 2 invalid input or configuration, 3 algorithmic
failure.  Errors are written to stderr as JSON ``{code, message, context}``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import experiments as ex
from . import recovery as rc
from .bss import BssConfig, ceil_mul, run_bss
from .errors import (
    CapabilityError,
    FramesubError,
    InvalidConfigError,
    InvalidInputError,
    InvalidModelError,
)
from .fourier import FrequencyIndexSet, full_grid, hyperbolic_cross
from .frames import (
    WeightedSubframe,
    frame_bounds,
    frobenius_norm_sq,
    read_frame,
    subset_bounds,
    weighted_frame_bounds,
)
from . import strategies as st

STRATEGIES = ("random-weighted", "random-unweighted", "bss", "bss-perp", "plain-bss", "two-step")
VALIDATION = (InvalidInputError, InvalidConfigError, InvalidModelError, CapabilityError)
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InvalidConfigError(
            f"strategy {args.strategy!r} requires " + ", ".join("--" + n.replace("_", "-") for n in missing)
        )


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_frame(path):
    try:
        return read_frame(path)
    except OSError as exc:
        raise InvalidInputError(f"cannot read frame: {exc}", path=str(path)) from exc
    except ValueError as exc:
        if isinstance(exc, FramesubError):
            raise
        raise InvalidInputError(f"cannot parse frame: {exc}", path=str(path)) from exc


def cmd_bounds(args):
    Y = _load_frame(args.input)
    fb = frame_bounds(Y)
    _emit(_dump({"A": fb.A, "B": fb.B, "frobenius_sq": frobenius_norm_sq(Y), "m": Y.shape[1], "M": Y.shape[0]}), args.out)


def _subframe_csv(sub):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "weight"])
    for i, x in zip(sub.indices.tolist(), sub.weights.tolist()):
        w.writerow([i, repr(float(x))])
    return buf.getvalue()


def cmd_subsample(args):
    s = args.strategy
    if s in ("bss", "bss-perp"):
        _need(args, "b")
    if s in ("plain-bss", "two-step"):
        _need(args, "b_prime")
    if args.delta < 0:
        raise InvalidConfigError("--delta must be nonnegative")
    Y = _load_frame(args.input)
    M, m = Y.shape
    fb = frame_bounds(Y)
    rep = {"strategy": s, "m": m, "M": M, "seed": args.seed, "bounds_in": fb.to_dict()}
    if s == "bss":
        cfg = BssConfig(b=args.b, delta=args.delta, seed=args.seed, traversal=args.traversal)
        run = run_bss(Y, fb, cfg)
        sub = run.subframe
        rep.update(run.report(cfg, m, M, weighted_frame_bounds(Y, sub)))
        rep["certified_upper"] = run.gamma * fb.B * (1 + args.delta)
    elif s == "bss-perp":
        run = st.bss_perp_run(Y, args.b, args.delta, args.seed, args.traversal)
        sub = run.subframe
        cfg = BssConfig(b=args.b, delta=args.delta)
        rep.update(run.report(cfg, m, M, weighted_frame_bounds(Y, sub)))
        rep["bounds_in"] = fb.to_dict()
        rep["sandwich"] = sub.meta["sandwich"]
    elif s == "random-weighted":
        cfg = st.RandomDrawConfig(p=args.p, t=args.t, seed=args.seed, n_override=args.n)
        sub = st.random_weighted_subsample(Y, fb, cfg)
        rep.update({"p": args.p, "t": args.t, "n_draws": sub.meta["n_draws"],
                    "bounds_out": weighted_frame_bounds(Y, sub).to_dict()})
    elif s == "random-unweighted":
        cfg = st.RandomDrawConfig(p=args.p, t=args.t, c=args.c, seed=args.seed, n_override=args.n)
        J = st.random_unweighted_subsample(Y, cfg)
        idx, counts = np.unique(J, return_counts=True)
        sub = WeightedSubframe(idx, counts.astype(float), M)
        rep.update({"p": args.p, "t": args.t, "c": args.c, "n_draws": len(J),
                    "bounds_out": subset_bounds(Y, J, M / len(J)).to_dict(),
                    "certified_lower_ratio": (1 - args.c) * (1 - args.t)})
    elif s == "plain-bss":
        res = st.plain_bss_run(Y, args.b_prime, args.delta, args.seed, args.traversal, strict=not args.relaxed)
        sub = WeightedSubframe.unweighted(res.J, M)
        rep.update(res.meta)
        rep.update({"delta": args.delta, "budget": ceil_mul(args.b_prime, m),
                    "pencil_lambda_min": st.plain_bss_pencil(Y, res.J),
                    "bounds_out": subset_bounds(Y, res.J).to_dict()})
    else:  # two-step
        res = st.two_step_unitnorm(Y, args.b_prime, args.p, args.t, args.seed, args.delta, strict=not args.relaxed)
        U = st.unit_norm_rows(Y, res.J)
        fbu = frame_bounds(U)
        idx, counts = np.unique(res.J, return_counts=True)
        sub = WeightedSubframe(idx, counts.astype(float), M)
        rep.update({"p": args.p, "t": args.t, "b_prime": args.b_prime, "n_draws": res.n_draws,
                    "unit_norm_bounds": fbu.to_dict(),
                    "lower_guarantee": res.lower_guarantee, "upper_guarantee": res.upper_guarantee})
    rep["J"] = [int(i) for i in sub.indices.tolist()]
    rep["weights"] = [float(w) for w in sub.weights]
    rep["parent_M"] = M
    _emit(_subframe_csv(sub) if args.format == "csv" else _dump(rep), args.out)


def _frequencies(args) -> FrequencyIndexSet:
    if args.frequencies == "hyperbolic-cross":
        return hyperbolic_cross(args.d, args.R)
    if args.frequencies == "full-grid":
        return full_grid(args.d, args.lo, args.hi)
    raise InvalidConfigError(f"unknown frequency set {args.frequencies!r}")


def cmd_nodes(args):
    basis = rc.fourier_basis(_frequencies(args))
    ns = rc.generate_mz_nodes(basis, p=args.p, t=args.t, b=args.b, seed=args.seed,
                              redraw=args.redraw, strict=not args.relaxed)
    if args.out:
        rc.write_nodes_csv(args.out, ns)
    meta = dict(ns.meta, n=len(ns), m=basis.m, mz_lambda_min=rc.mz_lambda_min(basis, ns.nodes))
    sys.stdout.write(_dump(meta))


def cmd_recover(args):
    basis = rc.fourier_basis(_frequencies(args))
    try:
        ns = rc.read_nodes_csv(args.nodes)
        f = rc.read_samples_csv(args.samples)
    except OSError as exc:
        raise InvalidInputError(f"cannot read input: {exc}") from exc
    c = rc.least_squares_recover(basis, ns, f, weighted=args.weighted)
    out = {
        "m": basis.m,
        "n": len(ns),
        "weighted": bool(args.weighted),
        "frequencies": basis_indices(args),
        "coefficients": [[float(z.real), float(z.imag)] for z in c],
        "residual": float(np.linalg.norm(basis(ns.nodes) @ c - f)),
    }
    _emit(_dump(out), args.out)


def basis_indices(args):
    return _frequencies(args).indices.tolist()


def _b_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidConfigError(f"bad --b list {text!r}") from exc


def cmd_experiment(args):
    bs = _b_list(args.b) if args.b else None
    reps = ex.run_experiment(args.id, b=bs, seed=args.seed, baseline=not args.no_baseline,
                             grid=args.grid, m3=args.m3)
    if args.format == "csv":
        text = ex.reports_to_csv(reps)
    else:
        text = _dump([r.to_dict(timing=args.timing) for r in reps])
    _emit(text, args.out)


def build_parser():
    p = _Parser(prog="framesub", description="Frame subsampling toolkit")
    sp = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    b = sp.add_parser("bounds", help="optimal frame bounds of a frame file")
    b.add_argument("--in", dest="input", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    s = sp.add_parser("subsample", help="subsample a frame")
    s.add_argument("--strategy", choices=STRATEGIES, required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--b", type=float)
    s.add_argument("--b-prime", dest="b_prime", type=float)
    s.add_argument("--delta", type=float, default=0.0)
    s.add_argument("--p", type=float, default=0.1)
    s.add_argument("--t", type=float, default=0.5)
    s.add_argument("--c", type=float, default=0.5)
    s.add_argument("--n", type=int, help="override the random draw count")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--traversal", choices=("random", "sequential"), default="random")
    s.add_argument("--relaxed", action="store_true", help="allow PlainBSS outside m >= 10, b' >= 1 + 10/m")
    s.set_defaults(func=cmd_subsample)

    def freq_args(q):
        q.add_argument("--frequencies", choices=("hyperbolic-cross", "full-grid"), default="hyperbolic-cross")
        q.add_argument("--d", type=int, default=2)
        q.add_argument("--R", type=int, default=12)
        q.add_argument("--lo", type=int, default=-6)
        q.add_argument("--hi", type=int, default=6)

    n = sp.add_parser("nodes", help="generate MZ nodes for a Fourier space")
    freq_args(n)
    n.add_argument("--p", type=float, default=0.1)
    n.add_argument("--t", type=float, default=2 / 3)
    n.add_argument("--b", type=float, default=1.5)
    n.add_argument("--seed", type=int, default=DEFAULT_SEED)
    n.add_argument("--redraw", action="store_true")
    n.add_argument("--relaxed", action="store_true")
    n.add_argument("--out")
    n.set_defaults(func=cmd_nodes)

    r = sp.add_parser("recover", help="least-squares recovery from samples")
    freq_args(r)
    r.add_argument("--nodes", required=True)
    r.add_argument("--samples", required=True)
    r.add_argument("--weighted", action="store_true")
    r.add_argument("--out")
    r.set_defaults(func=cmd_recover)

    e = sp.add_parser("experiment", help="reproduce a Fourier subsampling experiment")
    e.add_argument("--id", type=int, choices=(1, 2, 3), required=True)
    e.add_argument("--b", help="one value or a comma-separated list")
    e.add_argument("--seed", type=int, default=DEFAULT_SEED)
    e.add_argument("--grid", action="store_true", help="experiment 3 on the streamed full grid")
    e.add_argument("--m3", type=int, default=100, help="frequency count for experiment 3")
    e.add_argument("--no-baseline", action="store_true")
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--timing", action="store_true", help="include runtimes in JSON output")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)
    return p


def _fail(code, message, context, status):
    sys.stderr.write(json.dumps({"code": code, "message": message, "context": context}, default=str) + "\n")
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", str(exc), {}, 2)
    try:
        args.func(args)
    except VALIDATION as exc:
        return _fail(exc.code, exc.message, exc.context, 2)
    except FramesubError as exc:
        return _fail(exc.code, exc.message, exc.context, 3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
