"""Approximate decision and value routines for curves in any dimension.

The decider smooths both curves coordinate-wise, cuts the results into
monotone pieces and sweeps the blocks of the free-space diagram in
lexicographic order.  Only blocks with a reachable entrance are processed,
which keeps the sweep inside the band around the block diagonal where
reachable free space can live.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import Curve, as_curve, linf_dist, monotone_breaks
from .freespace import block_propagate, exact_decide
from .oracle import endpoint_lower_bound, uniform_matching_cost
from .smoothing import simplify_report


@dataclass
class DecisionOutcome:
    """Verdict of an approximate decider.

    ``verdict`` True certifies ``d_F <= bound_factor * delta``; False
    certifies ``d_F > delta``.
    """

    verdict: bool
    bound_factor: float
    delta: float
    counters: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict


def _check_alpha(alpha: float, P: Curve, Q: Curve) -> None:
    if not 1.0 <= alpha <= max(P.n, Q.n):
        raise ValueError(f"alpha must lie in [1, {max(P.n, Q.n)}], got {alpha}")


def block_sweep(P: Curve, Q: Curve, delta: float) -> tuple[bool, dict]:
    """Exact reachability of the far corner by a sparse sweep over blocks."""
    bp = monotone_breaks(P.vertices)
    bq = monotone_breaks(Q.vertices)
    n_p, n_q = len(bp) - 1, len(bq) - 1
    counters = {"blocks_visited": 0, "pieces_p": n_p, "pieces_q": n_q, "max_blocks_in_column": 0}
    if linf_dist(P.vertices[0], Q.vertices[0]) > delta:
        return False, counters
    left_in: dict[int, tuple[float, float]] = {0: (0.0, 0.0)}
    for bi in range(n_p):
        p_piece = P.vertices[bp[bi]:bp[bi + 1] + 1]
        rows = sorted(left_in)
        if not rows:
            return False, counters
        nxt: dict[int, tuple[float, float]] = {}
        below = None
        k = 0
        bj = rows[0]
        in_column = 0
        while bj < n_q:
            e_l = left_in.get(bj)
            if e_l is None and below is None:
                while k < len(rows) and rows[k] <= bj:
                    k += 1
                if k == len(rows):
                    break
                bj = rows[k]
                continue
            q_piece = Q.vertices[bq[bj]:bq[bj + 1] + 1]
            top, right = block_propagate(p_piece, q_piece, below, e_l, delta)
            in_column += 1
            if right is not None:
                nxt[bj] = right
            below = top
            bj += 1
        counters["blocks_visited"] += in_column
        counters["max_blocks_in_column"] = max(counters["max_blocks_in_column"], in_column)
        left_in = nxt
    last = left_in.get(n_q - 1)
    reached = last is not None and last[1] == float(bq[-1] - bq[-2])
    return reached, counters


TIE_SLACK = 1e-12


def approx_decide_nd(P, Q, alpha: float, delta: float) -> DecisionOutcome:
    """Decide ``d_F <= (1 + 2 alpha) delta`` (True) or ``d_F > delta`` (False)."""
    P, Q = as_curve(P), as_curve(Q)
    if P.d != Q.d:
        raise ValueError("curves have different dimensions")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    _check_alpha(alpha, P, Q)
    rep = simplify_report(P, Q, alpha, delta)
    # smoothing can move a vertex exactly onto the delta boundary; a relative
    # slack far below any guarantee keeps such ties on the accepting side
    reached, counters = block_sweep(rep.P, rep.Q, delta * (1.0 + TIE_SLACK))
    counters["short_pieces"] = max(rep.short_counts)
    counters["epsilons"] = list(rep.epsilons)
    return DecisionOutcome(reached, 1.0 + 2.0 * alpha, delta, counters)


def geometric_search(decide, lower: float, upper: float, eps_search: float) -> float:
    """Smallest accepted value on the grid ``lower * (1 + eps) ** t``.

    ``decide(delta)`` must accept every ``delta >= upper``.  When ``lower``
    is 0 the grid base is found by stepping down from ``upper`` until a
    rejection.  Returns the accepted grid value whose predecessor was
    rejected (or is below ``lower``).
    """
    ratio = 1.0 + eps_search
    if lower <= 0.0:
        base = upper
        while decide(base):
            base /= ratio
            if base == 0.0:
                return 0.0
        lo_t = 0
    else:
        base = lower
        lo_t = -1
    hi_t = max(0, int(np.ceil(np.log(max(upper / base, 1.0)) / np.log(ratio))))
    while not decide(base * ratio ** hi_t):
        hi_t += 1
    while hi_t - lo_t > 1:
        mid = (lo_t + hi_t) // 2
        if decide(base * ratio ** mid):
            hi_t = mid
        else:
            lo_t = mid
    return base * ratio ** hi_t


def approx_frechet(P, Q, alpha: float, eps_search: float = 0.5) -> float:
    """Value within ``(1 + eps_search)(2 + 4 alpha)`` of the Frechet distance.

    ``alpha`` is clamped to the largest curve size accepted by the decider.
    """
    P, Q = as_curve(P), as_curve(Q)
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if not 0 < eps_search <= 1:
        raise ValueError("eps_search must lie in (0, 1]")
    if exact_decide(P, Q, 0.0):
        return 0.0
    a = min(alpha, max(P.n, Q.n))
    lower = endpoint_lower_bound(P, Q)
    upper = max(uniform_matching_cost(P, Q), lower)
    best = geometric_search(lambda d: approx_decide_nd(P, Q, a, d).verdict, lower, upper, eps_search)
    return (1.0 + 2.0 * a) * best
