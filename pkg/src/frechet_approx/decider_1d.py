"""Faster approximate decision for one-dimensional curves.

After simplification every reachable cell lies within ``K`` cells of the
cell diagonal.  The band is covered by rectangles laid out from left to
right, ``K`` cells wide and ``3K`` cells tall, and reachability is carried
from one rectangle to the next by approximate exit sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Curve, as_curve, collapse_degenerate_1d
from .decider_nd import TIE_SLACK, DecisionOutcome, geometric_search
from .exitsets import general_exit_set
from .freespace import exact_decide, free_interval_arrays
from .intervals import IntervalUnion, clip, contains_point, intersect, normalize
from .oracle import endpoint_lower_bound, exact_frechet, uniform_matching_cost
from .smoothing import short_pieces, simplify_report


@dataclass(frozen=True)
class RectangleCover:
    """Rectangles ``(x0, x1, y0, y1)`` of vertex indices, left to right.

    Rectangle ``r`` spans cells ``x0 <= i < x1`` and ``y0 <= j < y1``.
    """

    K: int
    cells_x: int
    cells_y: int
    rects: tuple[tuple[int, int, int, int], ...]

    def __len__(self) -> int:
        return len(self.rects)

    def covers(self, i: int, j: int) -> bool:
        return any(x0 <= i < x1 and y0 <= j < y1 for x0, x1, y0, y1 in self.rects)


def rectangle_cover(cells_x: int, cells_y: int, K: int) -> RectangleCover:
    """Cover every cell ``(i, j)`` with ``|i - j| <= K``.

    Each rectangle is ``K`` cells wide and its ``3K`` rows are centred on the
    diagonal cell of its middle column; rectangles are clipped at the
    diagram border.
    """
    if K < 1:
        raise ValueError("K must be positive")
    rects = []
    for x0 in range(0, cells_x, K):
        x1 = min(cells_x, x0 + K)
        y0 = max(0, x0 - K)
        y1 = min(cells_y, x0 + 2 * K)
        if y0 < y1:
            rects.append((x0, x1, y0, y1))
        else:
            rects.append((x0, x1, y0, y0))
    return RectangleCover(K, cells_x, cells_y, tuple(rects))


def _free_on_line(p: float, qv: np.ndarray, delta: float) -> IntervalUnion:
    m = len(qv)
    lo, hi = free_interval_arrays(qv[:-1, None], qv[1:, None], np.full((m - 1, 1), p), delta)
    return normalize((j + a, j + b) for j, (a, b) in enumerate(zip(lo, hi)) if a <= b)


def _check_alpha(alpha: float, P: Curve, Q: Curve) -> None:
    if not 1.0 <= alpha <= max(P.n, Q.n):
        raise ValueError(f"alpha must lie in [1, {max(P.n, Q.n)}], got {alpha}")


def fast_decide_1d(P, Q, alpha: float, delta: float) -> DecisionOutcome:
    """Decide ``d_F <= 3 alpha delta`` (True) or ``d_F > delta`` (False) for 1D curves."""
    P, Q = as_curve(P), as_curve(Q)
    if P.d != 1 or Q.d != 1:
        raise ValueError("fast_decide_1d expects one-dimensional curves")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    _check_alpha(alpha, P, Q)
    bound = 3.0 * alpha
    if delta == 0.0:
        return DecisionOutcome(exact_decide(P, Q, 0.0), bound, delta, {"exact": True})
    rep = simplify_report(collapse_degenerate_1d(P), collapse_degenerate_1d(Q), alpha, delta)
    Ph, Qh = collapse_degenerate_1d(rep.P), collapse_degenerate_1d(rep.Q)
    pv, qv = np.asarray(Ph.values), np.asarray(Qh.values)
    k = max(short_pieces(pv, delta), short_pieces(qv, delta))
    K = 2 * k + 1
    cover = rectangle_cover(Ph.n - 1, Qh.n - 1, K)
    counters = {"K": K, "short_pieces": k, "rectangles": len(cover), "entrance_components": 0}
    # same boundary slack as the nd decider
    dt = delta * (1.0 + TIE_SLACK)
    if abs(pv[0] - qv[0]) > dt:
        return DecisionOutcome(False, bound, delta, counters)
    S: IntervalUnion = [(0.0, 0.0)]
    for x0, x1, y0, y1 in cover.rects:
        local = [(a - y0, b - y0) for a, b in clip(S, y0, y1)]
        if not local or y1 <= y0:
            return DecisionOutcome(False, bound, delta, counters)
        counters["entrance_components"] += len(local)
        E = general_exit_set(pv[x0:x1 + 1], qv[y0:y1 + 1], local, alpha, dt)
        S = intersect([(a + y0, b + y0) for a, b in E.intervals], _free_on_line(pv[x1], qv, dt))
    end = float(Qh.n - 1)
    return DecisionOutcome(contains_point(S, end, 1e-12), bound, delta, counters)


def approx_frechet_1d(P, Q, alpha: float, eps_search: float = 1.0) -> float:
    """Value ``v`` with ``d_F <= v <= alpha (1 + eps_search) d_F`` for 1D curves.

    For ``alpha >= 6`` the decider runs with ``alpha / 6`` inside a geometric
    search; smaller ``alpha`` uses bisection on the exact decider.
    """
    P, Q = as_curve(P), as_curve(Q)
    if P.d != 1 or Q.d != 1:
        raise ValueError("approx_frechet_1d expects one-dimensional curves")
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if not 0 < eps_search <= 1:
        raise ValueError("eps_search must lie in (0, 1]")
    if exact_decide(P, Q, 0.0):
        return 0.0
    lower = endpoint_lower_bound(P, Q)
    upper = max(uniform_matching_cost(P, Q), lower)
    if alpha < 6:
        return exact_frechet(P, Q, tol=1e-9 * max(upper, 1e-300))
    a = min(alpha / 6.0, max(P.n, Q.n))
    best = geometric_search(lambda d: fast_decide_1d(P, Q, a, d).verdict, lower, upper, eps_search)
    return 3.0 * a * best
