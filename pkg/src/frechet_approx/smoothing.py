"""Truncated smoothings of one-dimensional curves.

Smoothing by ``eps`` shortens every monotone piece by ``eps`` at both ends,
recursively once pieces collapse.  The vertex count never changes; vertices
that stop being extrema become degenerate.  The *death time* of a vertex is
the smallest ``eps`` at which it is degenerate.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curves import Curve, as_curve, monotone_breaks, project

INF = math.inf


@dataclass
class CartesianTree:
    """Heap-ordered binary tree whose in-order traversal is the index order.

    Equal values are resolved so that the rightmost occurrence is the
    ancestor.  ``left``/``right``/``parent`` hold node indices or -1.
    """

    values: list[float]
    mode: str
    root: int
    left: list[int]
    right: list[int]
    parent: list[int] = field(repr=False)

    def preorder(self) -> list[int]:
        out: list[int] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            if self.right[v] >= 0:
                stack.append(self.right[v])
            if self.left[v] >= 0:
                stack.append(self.left[v])
        return out

    def inorder(self) -> list[int]:
        out: list[int] = []
        stack: list[int] = []
        v = self.root
        while stack or v >= 0:
            while v >= 0:
                stack.append(v)
                v = self.left[v]
            v = stack.pop()
            out.append(v)
            v = self.right[v]
        return out

    def subtree_extreme(self, pick) -> list[float]:
        """``pick`` (min or max) of values over each node's subtree."""
        agg = list(self.values)
        for v in reversed(self.preorder()):
            p = self.parent[v]
            if p >= 0:
                agg[p] = pick(agg[p], agg[v])
        return agg


def build_cartesian_tree(values: Sequence[float], mode: str = "max") -> CartesianTree:
    """Right-spine stack construction in O(n)."""
    vals = [float(x) for x in values]
    if not vals:
        raise ValueError("cannot build a Cartesian tree of an empty sequence")
    if mode not in ("max", "min"):
        raise ValueError("mode must be 'max' or 'min'")
    sign = 1.0 if mode == "max" else -1.0
    n = len(vals)
    left, right, parent = [-1] * n, [-1] * n, [-1] * n
    stack: list[int] = []
    for i in range(n):
        last = -1
        while stack and sign * vals[stack[-1]] <= sign * vals[i]:
            last = stack.pop()
        if last >= 0:
            left[i] = last
            parent[last] = i
        if stack:
            right[stack[-1]] = i
            parent[i] = stack[-1]
        stack.append(i)
    return CartesianTree(vals, mode, stack[0], left, right, parent)


@dataclass(frozen=True)
class DeathTimeTable:
    """Death time per vertex; endpoints are infinite, degenerate vertices 0."""

    times: tuple[float, ...]

    def __getitem__(self, i: int) -> float:
        return self.times[i]

    def __len__(self) -> int:
        return len(self.times)

    def finite(self) -> list[float]:
        return [t for t in self.times[1:-1]]


def _turning_vertices(values: np.ndarray) -> list[int]:
    return monotone_breaks(values[:, None])


def death_times(P1d) -> DeathTimeTable:
    """Death times from the max- and min-Cartesian trees of the extrema.

    For a local maximum ``p`` the subtree of ``p`` in the max-tree is the
    component of ``{<= p}`` around it; ``m`` is the smaller drop from ``p`` to
    the minimum on either side, and the death time is ``m / 2``.  Minima are
    symmetric.  Vertices that are not extrema get 0.
    """
    v = np.asarray(as_curve(P1d).values, dtype=float)
    n = len(v)
    times = [0.0] * n
    times[0] = times[-1] = INF
    turns = _turning_vertices(v)
    ext = [float(v[k]) for k in turns]
    if len(ext) > 2:
        tmax = build_cartesian_tree(ext, "max")
        tmin = build_cartesian_tree(ext, "min")
        low = tmax.subtree_extreme(min)
        high = tmin.subtree_extreme(max)
        for k in range(1, len(ext) - 1):
            x = ext[k]
            if x > ext[k - 1]:
                m = min(x - low[tmax.left[k]], x - low[tmax.right[k]])
            else:
                m = min(high[tmin.left[k]] - x, high[tmin.right[k]] - x)
            times[turns[k]] = 0.5 * m
    return DeathTimeTable(tuple(times))


def _nearest_greater(tau: list[float]) -> tuple[list[int], list[int]]:
    """Nearest strictly greater index on each side (-1 if none)."""
    n = len(tau)
    left, right = [-1] * n, [-1] * n
    stack: list[int] = []
    for i in range(n):
        while stack and tau[stack[-1]] <= tau[i]:
            stack.pop()
        left[i] = stack[-1] if stack else -1
        stack.append(i)
    stack = []
    for i in range(n - 1, -1, -1):
        while stack and tau[stack[-1]] <= tau[i]:
            stack.pop()
        right[i] = stack[-1] if stack else -1
        stack.append(i)
    return left, right


def _is_max(v: np.ndarray, i: int) -> bool:
    """Orientation of interior vertex i from its nearest distinct neighbours."""
    j = i - 1
    while j > 0 and v[j] == v[i]:
        j -= 1
    return v[i] > v[j]


def _endpoint_scan(v: np.ndarray, tau: list[float], kind: list[bool], eps: float):
    """Value of the first vertex after smoothing by ``eps``.

    Returns ``(value, time, final)``.  When ``final`` is true every interior
    vertex is dead by ``time`` and ``value`` is the endpoint at ``time``;
    the two endpoints then approach each other.
    """
    n = len(v)
    c = float(v[0])
    done = 0.0
    i = 1
    while tau[i] <= done and i < n - 1:
        i += 1
    while True:
        nxt = tau[i]
        if nxt == INF:
            return c, done, True
        target = v[i] - done if kind[i] else v[i] + done
        step = 1.0 if target > c else -1.0
        if eps <= nxt:
            return c + step * (eps - done), eps, False
        c += step * (nxt - done)
        done = nxt
        i += 1
        while tau[i] <= done:
            i += 1


def truncated_smoothing(P1d, eps: float, table: DeathTimeTable | None = None) -> Curve:
    """Truncated smoothing of a 1D curve in O(n) given its death times."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    curve = as_curve(P1d)
    if curve.d != 1:
        raise ValueError("truncated_smoothing expects a 1D curve")
    v = np.asarray(curve.values, dtype=float)
    n = len(v)
    if eps == 0.0:
        return curve
    if np.all(v == v[0]):
        return curve
    tau = list((table or death_times(curve)).times)
    kind = [False] + [_is_max(v, i) for i in range(1, n - 1)] + [False]
    out = np.empty(n)

    a, ta, fa = _endpoint_scan(v, tau, kind, eps)
    rv = v[::-1].copy()
    b, tb, fb = _endpoint_scan(rv, tau[::-1], kind[::-1], eps)
    if fa and fb:
        rest = eps - max(ta, tb)
        if abs(a - b) <= 2.0 * rest:
            a = b = 0.5 * (a + b)
        else:
            s = 1.0 if b > a else -1.0
            a, b = a + s * rest, b - s * rest
    out[0], out[-1] = a, b

    lft, rgt = _nearest_greater(tau)
    tree = build_cartesian_tree(tau, "max")
    for i in tree.preorder():
        if i == 0 or i == n - 1:
            continue
        t = tau[i]
        shift = min(eps, t)
        x = v[i] - shift if kind[i] else v[i] + shift
        if t <= eps:
            lo, hi = out[lft[i]], out[rgt[i]]
            if lo > hi:
                lo, hi = hi, lo
            x = min(max(x, lo), hi)
        out[i] = x
    return Curve(out)


def _select(values: list[float], k: int) -> float:
    """k-th smallest (0-based) by median of medians, linear time."""
    vals = values
    while True:
        if len(vals) <= 10:
            return sorted(vals)[k]
        groups = [sorted(vals[i:i + 5]) for i in range(0, len(vals), 5)]
        medians = [g[len(g) // 2] for g in groups]
        pivot = _select(medians, len(medians) // 2)
        lows = [x for x in vals if x < pivot]
        highs = [x for x in vals if x > pivot]
        n_eq = len(vals) - len(lows) - len(highs)
        if k < len(lows):
            vals = lows
        elif k < len(lows) + n_eq:
            return pivot
        else:
            k -= len(lows) + n_eq
            vals = highs


def median(values: list[float]) -> float:
    return _select(list(values), (len(values) - 1) // 2)


@dataclass(frozen=True)
class SmoothingParameterResult:
    """Chosen smoothing parameter with its window count.

    ``window_count`` is the number of death times in ``(eps, eps + delta]``;
    ``short_edge_count`` is filled in by callers that recount the pieces of
    length at most ``2 delta`` in the smoothed curves.
    """

    epsilon: float
    window_count: int
    short_edge_count: int | None = None
    used_fallback: bool = False


def _halving_search(M: list[float], alpha: float, delta: float, n: int) -> float:
    offset = 0.0
    while len(M) > n / alpha:
        half = 0.5 * alpha * delta
        med = median(M)
        if med > half:
            M = [m for m in M if m <= half]
        else:
            M = [m - half for m in M if m > half]
            offset += half
        alpha *= 0.5
    return offset


def _window_count(sorted_m: list[float], eps: float, delta: float) -> int:
    return bisect.bisect_right(sorted_m, eps + delta) - bisect.bisect_right(sorted_m, eps)


def find_parameter(M: Sequence[float], alpha: float, delta: float, n: int) -> SmoothingParameterResult:
    """A parameter ``eps <= alpha * delta`` with few death times just above it.

    Returns ``eps`` in ``M`` or 0 with at most ``n / alpha`` elements of ``M``
    in ``(eps, eps + delta]``.  The halving recursion proposes a value which
    is snapped down to the nearest element of ``M | {0}``; if the count is
    still too large the candidates are scanned directly.
    """
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    finite = sorted(float(m) for m in M if m != INF)
    limit = alpha * delta
    bound = n / alpha
    guess = _halving_search(list(finite), alpha, delta, n)
    below = [m for m in finite if m <= guess]
    eps = below[-1] if below else 0.0
    count = _window_count(finite, eps, delta)
    if eps <= limit and count <= bound:
        return SmoothingParameterResult(eps, count)
    best_eps, best_count = 0.0, _window_count(finite, 0.0, delta)
    for cand in finite:
        if cand > limit:
            break
        c = _window_count(finite, cand, delta)
        if c < best_count:
            best_eps, best_count = cand, c
        if best_count <= bound:
            break
    return SmoothingParameterResult(best_eps, best_count, used_fallback=True)


def short_pieces(values, delta: float) -> int:
    """Number of monotone pieces of length at most ``2 delta``."""
    v = np.asarray(values, dtype=float)
    ends = v[monotone_breaks(v[:, None])]
    return int(np.count_nonzero(np.abs(np.diff(ends)) <= 2.0 * delta))


@dataclass(frozen=True)
class SimplificationReport:
    """Per-axis smoothing parameters and short-piece counts of a simplification."""

    P: Curve
    Q: Curve
    epsilons: tuple[float, ...]
    short_counts: tuple[int, ...]
    short_per_curve: tuple[tuple[int, int], ...]
    fallbacks: int


def pointwise_merge(P: Curve, cols) -> Curve:
    """Combine per-axis smoothed vertex values into one curve.

    On edge ``i`` the smoothed axis ``l`` equals the original coordinate
    clamped between its smoothed values at the two edge ends.  Every clamp
    kink of every axis becomes a vertex, so all axes share the original
    parameterization.  A single axis needs no extra vertices.
    """
    S = np.column_stack(cols)
    if P.d == 1:
        return Curve(S)
    V = P.vertices
    out = [S[0]]
    for i in range(P.n - 1):
        a, b = V[i], V[i + 1]
        lo = np.minimum(S[i], S[i + 1])
        hi = np.maximum(S[i], S[i + 1])
        w = b - a
        ts = []
        for ax in np.flatnonzero(w != 0.0):
            for level in (lo[ax], hi[ax]):
                t = (level - a[ax]) / w[ax]
                if 0.0 < t < 1.0:
                    ts.append(t)
        for t in sorted(set(ts)):
            out.append(np.clip(a + t * w, lo, hi))
        out.append(S[i + 1])
    return Curve(np.asarray(out))


def simplify_report(P, Q, alpha: float, delta: float) -> SimplificationReport:
    """Coordinate-wise truncated smoothing of a curve pair.

    For each axis the death times of both projections feed
    :func:`find_parameter` with ``n = |P| + |Q|``; both projections are then
    smoothed by the same parameter.  In several dimensions the axes are
    reassembled on the original parameterization, see :func:`pointwise_merge`.
    """
    P, Q = as_curve(P), as_curve(Q)
    if P.d != Q.d:
        raise ValueError("curves have different dimensions")
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    n = P.n + Q.n
    p_cols, q_cols = [], []
    eps_list, counts, per_curve = [], [], []
    fallbacks = 0
    for axis in range(P.d):
        pa, qa = project(P, axis), project(Q, axis)
        tp, tq = death_times(pa), death_times(qa)
        M = tp.finite() + tq.finite()
        res = find_parameter(M, alpha, delta, n)
        ps, qs = truncated_smoothing(pa, res.epsilon, tp), truncated_smoothing(qa, res.epsilon, tq)
        sp, sq = short_pieces(ps.values, delta), short_pieces(qs.values, delta)
        if sp + sq > 2.0 * n / alpha:
            # recount-driven scan over all admissible candidates
            fallbacks += 1
            best = (sp + sq, res.epsilon, ps, qs, sp, sq)
            for cand in sorted(set(m for m in M if m <= alpha * delta)):
                cp, cq = truncated_smoothing(pa, cand, tp), truncated_smoothing(qa, cand, tq)
                cnt_p, cnt_q = short_pieces(cp.values, delta), short_pieces(cq.values, delta)
                if cnt_p + cnt_q < best[0]:
                    best = (cnt_p + cnt_q, cand, cp, cq, cnt_p, cnt_q)
                if best[0] <= 2.0 * n / alpha:
                    break
            _, eps_used, ps, qs, sp, sq = best
        else:
            eps_used = res.epsilon
        p_cols.append(ps.values)
        q_cols.append(qs.values)
        eps_list.append(eps_used)
        counts.append(sp + sq)
        per_curve.append((sp, sq))
    P_hat = pointwise_merge(P, p_cols)
    Q_hat = pointwise_merge(Q, q_cols)
    return SimplificationReport(P_hat, Q_hat, tuple(eps_list), tuple(counts), tuple(per_curve), fallbacks)


def simplify_nd(P, Q, alpha: float, delta: float) -> tuple[Curve, Curve]:
    """Simplified pair whose distance is within ``2 alpha delta`` of the input's."""
    rep = simplify_report(P, Q, alpha, delta)
    return rep.P, rep.Q
