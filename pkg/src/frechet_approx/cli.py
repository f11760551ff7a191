"""Command-line front end.

Curve files are plain text: the dimension on the first line, the vertex
count on the second, then one row of whitespace-separated coordinates per
vertex.  Reports are ``key: value`` lines, or a JSON object with ``--json``.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64); the
environment variable ``FRECHET_SEED`` overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path
from typing import TextIO

import numpy as np

from .curves import Curve, monotone_breaks, project
from .decider_1d import approx_frechet_1d, fast_decide_1d
from .decider_nd import approx_decide_nd, approx_frechet
from .freespace import diagram_rows, exact_decide
from .oracle import exact_frechet, uniform_matching_cost
from .signatures import compute_signature
from .smoothing import short_pieces, simplify_report, truncated_smoothing

PROFILES = ("random-walk", "long-edges", "spiky", "adversarial-grid")
EXIT_YES, EXIT_NO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class CurveFileError(UsageError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.line = line


# curve files

def parse_curve(text: str, path="<string>") -> Curve:
    rows = [(k + 1, ln.split()) for k, ln in enumerate(text.splitlines())]
    rows = [(k, toks) for k, toks in rows if toks]
    if len(rows) < 2:
        raise CurveFileError(path, len(rows) + 1, "missing header (dimension, vertex count)")

    def header_int(k, toks, what):
        if len(toks) != 1:
            raise CurveFileError(path, k, f"expected a single {what}")
        try:
            val = int(toks[0])
        except ValueError:
            raise CurveFileError(path, k, f"{what} must be an integer, got {toks[0]!r}") from None
        if val < 1:
            raise CurveFileError(path, k, f"{what} must be positive")
        return val

    d = header_int(*rows[0], "dimension")
    n = header_int(*rows[1], "vertex count")
    body = rows[2:]
    if len(body) != n:
        line = body[-1][0] + 1 if body else rows[1][0] + 1
        raise CurveFileError(path, line, f"expected {n} vertex rows, found {len(body)}")
    out = np.empty((n, d))
    for r, (k, toks) in enumerate(body):
        if len(toks) != d:
            raise CurveFileError(path, k, f"expected {d} coordinates, found {len(toks)}")
        try:
            out[r] = [float(t) for t in toks]
        except ValueError:
            raise CurveFileError(path, k, "coordinates must be decimal numbers") from None
        if not np.all(np.isfinite(out[r])):
            raise CurveFileError(path, k, "coordinates must be finite")
    return Curve(out)


def read_curve(path) -> Curve:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_curve(text, path)


def format_curve(curve: Curve) -> str:
    # repr gives the shortest string that round-trips the float exactly
    lines = [str(curve.d), str(curve.n)]
    lines += [" ".join(repr(float(x)) for x in row) for row in curve.vertices]
    return "\n".join(lines) + "\n"


def write_curve(curve: Curve, path) -> None:
    Path(path).write_text(format_curve(curve))


# reports

def emit_report(report: dict, as_json: bool, stream: TextIO) -> None:
    if as_json:
        stream.write(json.dumps(report, indent=2, default=float) + "\n")
        return
    for key, val in report.items():
        if isinstance(val, dict):
            for k2, v2 in val.items():
                stream.write(f"{key}.{k2}: {_fmt(v2)}\n")
        else:
            stream.write(f"{key}: {_fmt(val)}\n")


def _fmt(val) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, (list, tuple)):
        return ",".join(_fmt(v) for v in val)
    if val is None:
        return "none"
    return str(val)


def _seed(args) -> int:
    env = os.environ.get("FRECHET_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"FRECHET_SEED must be an integer, got {env!r}") from None
    return args.seed


def _pair(args) -> tuple[Curve, Curve]:
    P, Q = read_curve(args.P), read_curve(args.Q)
    if P.d != Q.d:
        raise UsageError(f"dimension mismatch: {P.d} vs {Q.d}")
    if args.mode == "1d" and P.d != 1:
        raise UsageError("mode 1d needs one-dimensional curves")
    return P, Q


def _positive(name: str, val: float, allow_zero: bool = True) -> None:
    if val < 0 or (val == 0 and not allow_zero) or not np.isfinite(val):
        raise UsageError(f"{name} must be {'non-negative' if allow_zero else 'positive'}")


def _clamp_alpha(alpha: float, P: Curve, Q: Curve) -> float:
    if alpha < 1:
        raise UsageError("alpha must be at least 1")
    return min(alpha, float(max(P.n, Q.n)))


# subcommands

def cmd_decide(args) -> tuple[dict, int]:
    P, Q = _pair(args)
    _positive("delta", args.delta)
    t0 = time.perf_counter()
    counters: dict = {}
    if args.mode == "exact":
        verdict, bound, alpha = exact_decide(P, Q, args.delta), 1.0, None
    else:
        alpha = _clamp_alpha(args.alpha, P, Q)
        run = approx_decide_nd if args.mode == "nd" else fast_decide_1d
        out = run(P, Q, alpha, args.delta)
        verdict, bound, counters = out.verdict, out.bound_factor, out.counters
    elapsed = time.perf_counter() - t0
    report = {
        "command": "decide", "P": str(args.P), "Q": str(args.Q), "mode": args.mode,
        "n_p": P.n, "n_q": Q.n, "d": P.d, "delta": args.delta, "alpha": alpha,
        "verdict": "YES" if verdict else "NO",
        "guarantee_factor": bound,
        "certificate": (f"d_F <= {bound * args.delta!r}" if verdict else f"d_F > {args.delta!r}"),
        "elapsed_s": round(elapsed, 6),
        "counters": {k: v for k, v in counters.items() if not isinstance(v, list)},
    }
    return report, EXIT_YES if verdict else EXIT_NO


def cmd_dist(args) -> tuple[dict, int]:
    P, Q = _pair(args)
    _positive("tol", args.tol, allow_zero=False)
    if not 0 < args.eps_search <= 1:
        raise UsageError("eps-search must lie in (0, 1]")
    t0 = time.perf_counter()
    if args.mode == "exact":
        value, guarantee, alpha = exact_frechet(P, Q, args.tol), 1.0, None
    elif args.mode == "nd":
        alpha = _clamp_alpha(args.alpha, P, Q)
        value = approx_frechet(P, Q, alpha, args.eps_search)
        guarantee = (1.0 + args.eps_search) * (2.0 + 4.0 * alpha)
    else:
        if args.alpha < 1:
            raise UsageError("alpha must be at least 1")
        alpha = args.alpha
        value = approx_frechet_1d(P, Q, alpha, args.eps_search)
        guarantee = alpha * (1.0 + args.eps_search)
    report = {
        "command": "dist", "P": str(args.P), "Q": str(args.Q), "mode": args.mode,
        "n_p": P.n, "n_q": Q.n, "d": P.d, "alpha": alpha, "eps_search": args.eps_search,
        "value": value, "guarantee_factor": guarantee,
        "elapsed_s": round(time.perf_counter() - t0, 6),
    }
    if args.mode == "exact":
        report["tol"] = args.tol
    return report, 0


def _smooth_axes(curve: Curve, eps: float) -> Curve:
    cols = [truncated_smoothing(project(curve, k), eps).values for k in range(curve.d)]
    return Curve(np.column_stack(cols))


def cmd_smooth(args) -> tuple[dict, int]:
    P = read_curve(args.P)
    Q = read_curve(args.Q) if args.Q else None
    if Q is not None and Q.d != P.d:
        raise UsageError(f"dimension mismatch: {P.d} vs {Q.d}")
    report: dict = {"command": "smooth", "P": str(args.P), "Q": str(args.Q) if Q else None}
    if args.epsilon is not None:
        if args.alpha is not None:
            raise UsageError("give either --epsilon or --alpha with --delta")
        _positive("epsilon", args.epsilon)
        outs = [_smooth_axes(P, args.epsilon)] + ([_smooth_axes(Q, args.epsilon)] if Q else [])
        report["epsilon"] = [args.epsilon] * P.d
    else:
        if args.alpha is None or args.delta is None:
            raise UsageError("give --epsilon, or both --alpha and --delta")
        _positive("delta", args.delta)
        if args.alpha < 1:
            raise UsageError("alpha must be at least 1")
        # a single curve is searched as a pair with itself; counts then double alongside n
        rep = simplify_report(P, Q if Q is not None else P, args.alpha, args.delta)
        n = P.n + (Q.n if Q is not None else P.n)
        bound = 2.0 * n / args.alpha
        outs = [rep.P] + ([rep.Q] if Q is not None else [])
        report.update({"alpha": args.alpha, "delta": args.delta, "epsilon": list(rep.epsilons),
                       "short_edge_bound": bound if Q is not None else bound / 2,
                       "short_edge_bound_ok": all(c <= bound for c in rep.short_counts)})
    # pieces count as short at length <= 2 delta; delta defaults to epsilon
    delta_count = args.delta if args.delta is not None else args.epsilon
    report["count_delta"] = delta_count
    report["short_edges_p"] = [short_pieces(project(outs[0], k).values, delta_count) for k in range(P.d)]
    if Q is not None:
        report["short_edges_q"] = [short_pieces(project(outs[1], k).values, delta_count) for k in range(P.d)]
    if args.signature_delta is not None:
        if P.d != 1:
            raise UsageError("signatures need a one-dimensional curve")
        _positive("signature-delta", args.signature_delta)
        report["signature_p"] = list(compute_signature(outs[0], args.signature_delta).indices)
    targets = [args.out, args.out_q]
    for curve, target in zip(outs, targets):
        if target:
            write_curve(curve, target)
    report["out"] = args.out
    if Q is not None:
        report["out_q"] = args.out_q
    if not args.out:
        report["curve_p"] = outs[0].vertices.ravel().tolist() if P.d == 1 else outs[0].vertices.tolist()
    code = 0 if report.get("short_edge_bound_ok", True) else 1
    return report, code


def generate(profile: str, n: int, d: int, seed: int, delta: float = 1.0,
             cell_width: float = 1.0) -> Curve:
    """Deterministic curve of a named profile.

    random-walk: cumulative sums of standard normal steps.
    long-edges: every coordinate turns at every vertex with steps in
    (2 delta, 6 delta], so every monotone piece is longer than 2 delta.
    spiky: a slow random walk with roughly one vertex in four pushed out by a
    large spike.
    adversarial-grid: small integer multiples of ``cell_width`` jittered by
    at most 1% of a cell, so vertices sit next to grid lines.
    """
    if n < 2:
        raise UsageError("n must be at least 2")
    if d < 1:
        raise UsageError("d must be at least 1")
    rng = np.random.default_rng(seed)
    if profile == "random-walk":
        v = np.cumsum(rng.normal(0.0, 1.0, (n, d)), axis=0)
    elif profile == "long-edges":
        steps = rng.uniform(2.0 * delta, 6.0 * delta, (n - 1, d))
        steps = np.where(steps <= 2.0 * delta, 6.0 * delta, steps)
        sign = np.where(np.arange(n - 1) % 2 == 0, 1.0, -1.0)[:, None]
        sign = sign * rng.choice([-1.0, 1.0], size=(1, d))
        v = np.vstack([np.zeros((1, d)), np.cumsum(steps * sign, axis=0)])
    elif profile == "spiky":
        base = np.cumsum(rng.normal(0.0, 0.2, (n, d)), axis=0)
        spikes = (rng.random((n, 1)) < 0.25) * rng.choice([-1.0, 1.0], (n, d)) * rng.uniform(5, 10, (n, d))
        v = base + spikes
    elif profile == "adversarial-grid":
        k = rng.integers(-4, 5, (n, d))
        v = cell_width * (k + rng.uniform(-0.01, 0.01, (n, d)))
    else:
        raise UsageError(f"unknown profile {profile!r}")
    return Curve(v)


def min_piece_length(curve: Curve) -> float:
    """Shortest monotone piece, measured per coordinate."""
    v = curve.vertices
    b = monotone_breaks(v)
    return float(np.min(np.abs(np.diff(v[b], axis=0))))


def cmd_gen(args) -> tuple[dict, int]:
    seed = _seed(args)
    _positive("delta", args.delta, allow_zero=False)
    _positive("cell-width", args.cell_width, allow_zero=False)
    curve = generate(args.profile, args.n, args.d, seed, args.delta, args.cell_width)
    report = {"command": "gen", "profile": args.profile, "n": args.n, "d": args.d, "seed": seed}
    if args.profile == "long-edges":
        mpl = min_piece_length(curve)
        if curve.n > 1 and not mpl > 2.0 * args.delta:
            raise RuntimeError("long-edges generator produced a short piece")
        report.update({"delta": args.delta, "min_piece_length": mpl})
    if args.profile == "adversarial-grid":
        report["cell_width"] = args.cell_width
    if args.out:
        write_curve(curve, args.out)
        report["out"] = args.out
    else:
        sys.stdout.write(format_curve(curve))
    return report, 0


def _bench_once(n: int, alpha: float, mode: str, seed: int) -> tuple[float, int]:
    rng = np.random.default_rng(seed)
    P = np.cumsum(rng.normal(0.0, 1.0, n))
    Q = P + rng.normal(0.0, 0.3, n)
    # an accepted delta, so the sweep has to cover the whole band
    delta = uniform_matching_cost(Curve(P), Curve(Q))
    t0 = time.perf_counter()
    if mode == "nd":
        out = approx_decide_nd(P, Q, min(alpha, n), delta)
        work = out.counters["blocks_visited"]
    elif mode == "1d":
        out = fast_decide_1d(P, Q, min(alpha, n), delta)
        work = out.counters["entrance_components"]
    else:
        exact_decide(P, Q, delta)
        work = (n - 1) ** 2
    return time.perf_counter() - t0, int(work)


def cmd_bench(args) -> tuple[dict, int]:
    seed = _seed(args)
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
        alphas = [float(a) for a in args.alpha.split(",")]
    except ValueError:
        raise UsageError("--sizes and --alpha take comma-separated numbers") from None
    if any(s < 2 for s in sizes) or any(a < 1 for a in alphas) or args.reps < 1:
        raise UsageError("sizes must be >= 2, alphas >= 1, reps >= 1")
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["n", "alpha", "mode", "mean_time", "blocks_visited"])
        for n in sizes:
            for a in alphas:
                runs = [_bench_once(n, a, args.mode, seed + 1000 * r + n) for r in range(args.reps)]
                w.writerow([n, a, args.mode, f"{np.mean([t for t, _ in runs]):.6f}",
                            int(np.mean([b for _, b in runs]))])
    finally:
        if args.out:
            out.close()
    report = {"command": "bench", "mode": args.mode, "sizes": sizes, "alpha": alphas,
              "reps": args.reps, "seed": seed, "out": args.out}
    return report, 0


def cmd_diagram(args) -> tuple[dict, int]:
    P, Q = read_curve(args.P), read_curve(args.Q)
    if P.d != Q.d:
        raise UsageError(f"dimension mismatch: {P.d} vs {Q.d}")
    _positive("delta", args.delta)
    cells = (P.n - 1) * (Q.n - 1)
    if cells > args.cap and not args.force:
        raise UsageError(f"{cells} cells exceed the cap of {args.cap}; pass --force to export anyway")
    rows = diagram_rows(P, Q, args.delta)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["i", "j", "side", "lo", "hi"])
        for i, j, side, lo, hi in rows:
            w.writerow([i, j, side, "" if np.isnan(lo) else repr(lo), "" if np.isnan(hi) else repr(hi)])
    finally:
        if args.out:
            out.close()
    reach = {(i, j) for i, j, side, lo, _ in rows if side.startswith("reach") and not np.isnan(lo)}
    return {"command": "diagram", "cells": cells, "reachable_cells": len(reach), "out": args.out}, 0


# argument parsing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frechet", description="Approximate Frechet distance under L-infinity.")
    sub = ap.add_subparsers(dest="command", required=True)

    def pair(p):
        p.add_argument("P", help="first curve file")
        p.add_argument("Q", help="second curve file")
        p.add_argument("--mode", choices=("exact", "nd", "1d"), default="nd")
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("decide", help="approximate decision at a given delta")
    pair(p)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("dist", help="approximate distance value")
    pair(p)
    p.add_argument("--tol", type=float, default=1e-6, help="bisection tolerance for --mode exact")
    p.add_argument("--eps-search", type=float, default=0.5)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("smooth", help="truncated smoothing of one curve or a pair")
    p.add_argument("P")
    p.add_argument("Q", nargs="?")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--delta", type=float, help="parameter search scale; also the short-piece threshold")
    p.add_argument("--signature-delta", type=float, help="also report the signature of the smoothed P")
    p.add_argument("--out", "-o")
    p.add_argument("--out-q")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("gen", help="seeded random curve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", choices=PROFILES, default="random-walk")
    p.add_argument("--delta", type=float, default=1.0, help="piece-length scale for long-edges")
    p.add_argument("--cell-width", type=float, default=1.0, help="grid spacing for adversarial-grid")
    p.add_argument("--out", "-o")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="timing and work counters as CSV")
    p.add_argument("--sizes", default="1000")
    p.add_argument("--alpha", default="8")
    p.add_argument("--mode", choices=("exact", "nd", "1d"), default="nd")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("diagram", help="free-space diagram intervals as CSV")
    p.add_argument("P")
    p.add_argument("Q")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--cap", type=int, default=10_000, help="largest cell count exported without --force")
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", "-o")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_diagram)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # curve or CSV data on stdout pushes the report to stderr
    data_on_stdout = (
        (args.command == "gen" and not args.out)
        or (args.command in ("bench", "diagram") and not args.out)
    )
    stream = sys.stderr if data_on_stdout else sys.stdout
    try:
        report, code = args.func(args)
    except UsageError as exc:
        print(f"frechet {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit_report(report, args.json, stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
