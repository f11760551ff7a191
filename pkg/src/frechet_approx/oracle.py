"""Reference routines used to validate the fast algorithms.

Everything here favours a direct reading of the definitions over speed:
distances come from bisection over the exact decision procedure, and
smoothings and death times come from simulating the recursive truncation
event by event.
"""

from __future__ import annotations

import numpy as np

from .curves import Curve, as_curve, monotone_breaks
from .freespace import exact_decide, exact_reachable_right_boundary
from .intervals import IntervalUnion


def endpoint_lower_bound(P: Curve, Q: Curve) -> float:
    return max(
        float(np.max(np.abs(P.vertices[0] - Q.vertices[0]))),
        float(np.max(np.abs(P.vertices[-1] - Q.vertices[-1]))),
    )


def uniform_matching_cost(P: Curve, Q: Curve) -> float:
    """Cost of matching P(s) with Q(s) for the same global parameter s."""
    s = np.union1d(np.linspace(0.0, 1.0, P.n), np.linspace(0.0, 1.0, Q.n))
    tp = np.linspace(0.0, 1.0, P.n)
    tq = np.linspace(0.0, 1.0, Q.n)
    cost = 0.0
    for k in range(P.d):
        a = np.interp(s, tp, P.vertices[:, k])
        b = np.interp(s, tq, Q.vertices[:, k])
        cost = max(cost, float(np.max(np.abs(a - b))))
    return cost


def exact_frechet(P, Q, tol: float = 1e-6) -> float:
    """Frechet distance within ``tol`` by bisection on the exact decider."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    P, Q = as_curve(P), as_curve(Q)
    lo = endpoint_lower_bound(P, Q)
    if exact_decide(P, Q, lo):
        return lo
    hi = max(uniform_matching_cost(P, Q), lo)
    pad = max(hi, 1.0) * 1e-12
    while not exact_decide(P, Q, hi):
        hi += pad
        pad *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if exact_decide(P, Q, mid):
            hi = mid
        else:
            lo = mid
    return hi


def exact_exit_set(P, Q, S: IntervalUnion, delta: float) -> IntervalUnion:
    """Ground-truth exit set: every right-boundary point reachable from S."""
    return exact_reachable_right_boundary(P, Q, S, delta)


def _truncation_step(v: np.ndarray, budget: float) -> tuple[np.ndarray, float]:
    """Advance the recursive smoothing by at most ``budget``.

    Truncates every monotone piece at both ends by ``min(budget, half the
    shortest piece)`` and returns the new values and the amount used.
    """
    breaks = monotone_breaks(v[:, None])
    ends = v[breaks]
    lengths = np.abs(np.diff(ends))
    shortest = float(lengths.min())
    if shortest == 0.0:
        return v.copy(), 0.0
    step = min(budget, 0.5 * shortest)
    out = v.copy()
    for k in range(len(breaks) - 1):
        a, b = breaks[k], breaks[k + 1]
        lo, hi = min(ends[k], ends[k + 1]), max(ends[k], ends[k + 1])
        out[a:b + 1] = np.clip(v[a:b + 1], lo + step, hi - step)
    # collapsed pieces win at shared breakpoints
    if step == 0.5 * shortest:
        for k in range(len(breaks) - 1):
            if lengths[k] == shortest:
                out[breaks[k]:breaks[k + 1] + 1] = 0.5 * (ends[k] + ends[k + 1])
    return out, step


def brute_smoothing(values, eps: float) -> np.ndarray:
    """Truncated smoothing by direct event simulation."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    v = np.asarray(values, dtype=float).copy()
    remaining = eps
    while remaining > 0:
        v, used = _truncation_step(v, remaining)
        if used == 0.0:
            break
        remaining -= used
    return v


def _is_degenerate(v: np.ndarray, i: int) -> bool:
    return i not in monotone_breaks(v[:, None])


def brute_death_time(P1d, i: int, tol: float = 0.0) -> float:
    """Smallest smoothing parameter at which interior vertex ``i`` is degenerate.

    Indices are 0-based.  The simulation keeps only the vertices that are
    still extrema: a vertex is dropped at the event that makes it stop being
    a piece endpoint, so dead vertices clamped onto a surviving extremum can
    never take over its identity.  Pieces shorter than ``tol`` after an event
    count as collapsed.
    """
    v = np.asarray(as_curve(P1d).values, dtype=float)
    n = len(v)
    if not 0 < i < n - 1:
        raise ValueError("death time of an endpoint is infinite")
    alive = monotone_breaks(v[:, None])
    if i not in alive:
        return 0.0
    w = v[alive].copy()
    total = 0.0
    while len(w) > 2:
        w, used = _truncation_step(w, np.inf)
        if used == 0.0:
            break
        total += used
        if tol > 0:
            w = _snap_short_pieces(w, tol)
        keep = monotone_breaks(w[:, None])
        alive = [alive[k] for k in keep]
        w = w[keep]
        if i not in alive:
            return total
    return total


def _snap_short_pieces(w: np.ndarray, tol: float) -> np.ndarray:
    out = w.copy()
    for k in range(len(out) - 1):
        if abs(out[k + 1] - out[k]) <= tol:
            out[k + 1] = out[k]
    return out
