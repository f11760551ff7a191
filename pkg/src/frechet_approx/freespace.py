"""Free-space geometry and exact reachability propagation.

Cell ``(i, j)`` of the free-space diagram of ``P`` and ``Q`` is the product
of edge ``i`` of ``P`` (horizontal, x) and edge ``j`` of ``Q`` (vertical, y).
Under L-infinity the free part of every cell side is one interval, computed
as an intersection of per-coordinate linear constraints.  Side intervals are
fractions in ``[0, 1]`` along the side; boundary intervals returned by the
propagation routines are float positions along the whole curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curves import Curve, as_curve, monotone_breaks
from .intervals import Interval, IntervalUnion, normalize

Side = Optional[Interval]


def segment_free_interval(a, b, c, delta: float) -> Side:
    """Fractions t in [0, 1] with ``|a + t (b - a) - c|_inf <= delta``."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    lo, hi = free_interval_arrays(a, b, c, delta)
    lo, hi = float(lo), float(hi)
    return (lo, hi) if lo <= hi else None


_BELOW_ONE = float(np.nextafter(1.0, 0.0))
_ABOVE_ZERO = float(np.nextafter(0.0, 1.0))


def free_interval_arrays(A: np.ndarray, B: np.ndarray, C: np.ndarray, delta: float):
    """Vectorized :func:`segment_free_interval` over leading axes.

    The last axis holds coordinates.  Returns ``(lo, hi)`` arrays; an entry
    is empty where ``lo > hi``.  Whether an endpoint is free is decided by the
    same vertex test that the neighbouring edge uses, so adjacent sides agree
    at shared vertices despite rounding.
    """
    A, B, C = np.broadcast_arrays(np.asarray(A, dtype=float), np.asarray(B, dtype=float),
                                  np.asarray(C, dtype=float))
    u0 = A - C
    u1 = B - C
    w = B - A
    in0 = np.abs(u0) <= delta
    in1 = np.abs(u1) <= delta
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (-delta - u0) / w
        t2 = (delta - u0) / w
    flat = w == 0.0
    lo_k = np.where(flat, np.where(in0, -np.inf, np.inf), np.minimum(t1, t2))
    hi_k = np.where(flat, np.where(in0, np.inf, -np.inf), np.maximum(t1, t2))
    lo_k = np.where(in0, np.minimum(lo_k, 0.0), np.maximum(lo_k, _ABOVE_ZERO))
    hi_k = np.where(in1, np.maximum(hi_k, 1.0), np.minimum(hi_k, _BELOW_ONE))
    lo = np.maximum(lo_k.max(axis=-1), 0.0)
    hi = np.minimum(hi_k.min(axis=-1), 1.0)
    return lo, hi


@dataclass(frozen=True)
class CellFreeSpace:
    """Free intervals on the four sides of one cell (None when empty)."""

    left: Side
    right: Side
    bottom: Side
    top: Side


def cell_free_space(p_edge, q_edge, delta: float) -> CellFreeSpace:
    """Free side intervals of the cell spanned by two segments.

    ``p_edge`` and ``q_edge`` are pairs of endpoints.  Left and right sides fix
    the first and last point of ``p_edge`` and let ``q_edge`` vary; bottom and
    top fix the endpoints of ``q_edge`` and let ``p_edge`` vary.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    p0, p1 = p_edge
    q0, q1 = q_edge
    if np.atleast_1d(p0).shape != np.atleast_1d(q0).shape:
        raise ValueError("edge dimensions differ")
    return CellFreeSpace(
        left=segment_free_interval(q0, q1, p0, delta),
        right=segment_free_interval(q0, q1, p1, delta),
        bottom=segment_free_interval(p0, p1, q0, delta),
        top=segment_free_interval(p0, p1, q1, delta),
    )


class FreeSpaceGrid:
    """All cell-side free intervals of a curve pair, computed once.

    ``vert(i, j)`` is the free part of vertical side x = i over Q edge j,
    ``horiz(i, j)`` the free part of horizontal side y = j over P edge i.
    """

    def __init__(self, P: Curve, Q: Curve, delta: float) -> None:
        if delta < 0:
            raise ValueError("delta must be non-negative")
        if P.d != Q.d:
            raise ValueError("curves have different dimensions")
        self.P, self.Q, self.delta = P, Q, delta
        pv, qv = P.vertices, Q.vertices
        vlo, vhi = free_interval_arrays(qv[None, :-1], qv[None, 1:], pv[:, None], delta)
        hlo, hhi = free_interval_arrays(pv[:-1, None], pv[1:, None], qv[None, :], delta)
        self._vlo, self._vhi = vlo.tolist(), vhi.tolist()
        self._hlo, self._hhi = hlo.tolist(), hhi.tolist()

    def vert(self, i: int, j: int) -> Side:
        lo, hi = self._vlo[i][j], self._vhi[i][j]
        return (lo, hi) if lo <= hi else None

    def horiz(self, i: int, j: int) -> Side:
        lo, hi = self._hlo[i][j], self._hhi[i][j]
        return (lo, hi) if lo <= hi else None


def _cell_step(left: Side, bottom: Side, right_free: Side, top_free: Side) -> tuple[Side, Side]:
    """Reachable (right, top) of a convex cell given reachable (left, bottom)."""
    if right_free is None:
        right = None
    elif bottom is not None:
        right = right_free
    elif left is not None:
        lo = max(right_free[0], left[0])
        right = (lo, right_free[1]) if lo <= right_free[1] else None
    else:
        right = None
    if top_free is None:
        top = None
    elif left is not None:
        top = top_free
    elif bottom is not None:
        lo = max(top_free[0], bottom[0])
        top = (lo, top_free[1]) if lo <= top_free[1] else None
    else:
        top = None
    return right, top


def _left_boundary_reach(grid: FreeSpaceGrid, S: IntervalUnion) -> list[Side]:
    """Points of the line x = 0 reachable from entrance set S by moving up."""
    m = grid.Q.n
    reach: list[Side] = []
    carry = False
    for j in range(m - 1):
        f = grid.vert(0, j)
        if f is None:
            reach.append(None)
            carry = False
            continue
        start = None
        if carry and f[0] == 0.0:
            start = 0.0
        else:
            for a, b in S:
                lo = max(a, j + f[0])
                if lo <= min(b, j + f[1]):
                    start = lo - j
                    break
        if start is None:
            reach.append(None)
            carry = False
        else:
            reach.append((start, f[1]))
            carry = f[1] == 1.0
    return reach


def _propagate(grid: FreeSpaceGrid, S: IntervalUnion, visit=None) -> list[Side]:
    """Reachable intervals on the right boundary x = n - 1, one per Q edge.

    ``visit(i, j, left, bottom)`` is called for every cell with its reachable
    entrance sides.
    """
    n, m = grid.P.n, grid.Q.n
    left = _left_boundary_reach(grid, normalize(S))
    carry = left[0] is not None and left[0][0] == 0.0
    bottom_line: list[Side] = []
    for i in range(n - 1):
        f = grid.horiz(i, 0)
        if carry and f is not None and f[0] == 0.0:
            bottom_line.append(f)
            carry = f[1] == 1.0
        else:
            bottom_line.append(None)
            carry = False
    for i in range(n - 1):
        bottom = bottom_line[i]
        nxt: list[Side] = []
        for j in range(m - 1):
            if visit is not None:
                visit(i, j, left[j], bottom)
            right, bottom = _cell_step(left[j], bottom, grid.vert(i + 1, j), grid.horiz(i, j + 1))
            nxt.append(right)
        left = nxt
    return left


def exact_decide(P, Q, delta: float) -> bool:
    """True iff the Frechet distance of P and Q is at most delta (L-infinity)."""
    P, Q = as_curve(P), as_curve(Q)
    grid = FreeSpaceGrid(P, Q, delta)
    last = _propagate(grid, [(0.0, 0.0)])[-1]
    return last is not None and last[1] == 1.0


def exact_reachable_right_boundary(P, Q, S: IntervalUnion, delta: float) -> IntervalUnion:
    """Right-boundary points reachable from left-boundary entrance set S.

    Entrances and results are float positions along Q.
    """
    P, Q = as_curve(P), as_curve(Q)
    if not S:
        return []
    grid = FreeSpaceGrid(P, Q, delta)
    right = _propagate(grid, S)
    return normalize((j + iv[0], j + iv[1]) for j, iv in enumerate(right) if iv is not None)


def reachable_cells(P, Q, delta: float) -> set[tuple[int, int]]:
    """Cells entered by a delta-reachable path from the origin."""
    P, Q = as_curve(P), as_curve(Q)
    cells: set[tuple[int, int]] = set()

    def visit(i, j, left, bottom):
        if left is not None or bottom is not None:
            cells.add((i, j))

    _propagate(FreeSpaceGrid(P, Q, delta), [(0.0, 0.0)], visit)
    return cells


def diagram_rows(P, Q, delta: float) -> list[tuple[int, int, str, float, float]]:
    """Per-cell free and reachable side intervals as ``(i, j, side, lo, hi)``.

    Sides ``left`` and ``bottom`` carry the free intervals, ``reach_left`` and
    ``reach_bottom`` the reachable ones.  Empty intervals are reported as NaN.
    """
    P, Q = as_curve(P), as_curve(Q)
    grid = FreeSpaceGrid(P, Q, delta)
    nan = float("nan")
    rows: list[tuple[int, int, str, float, float]] = []

    def visit(i, j, left, bottom):
        for side, iv in (("left", grid.vert(i, j)), ("bottom", grid.horiz(i, j)),
                         ("reach_left", left), ("reach_bottom", bottom)):
            lo, hi = iv if iv is not None else (nan, nan)
            rows.append((i, j, side, lo, hi))

    _propagate(grid, [(0.0, 0.0)], visit)
    return rows


def _single(parts: list[Interval], what: str) -> Side:
    merged = normalize(parts)
    if not merged:
        return None
    if len(merged) > 1:
        raise ValueError(f"{what} reachable set is not connected; pieces not monotone?")
    return merged[0]


def block_propagate(P_i, Q_j, e_B: Side, e_L: Side, delta: float) -> tuple[Side, Side]:
    """Reachable intervals on the top and right sides of a block.

    ``P_i`` and ``Q_j`` are coordinate-wise monotone curves spanning the
    block.  ``e_B`` is the reachable interval on the bottom side (positions
    along ``P_i``), ``e_L`` the one on the left side (positions along
    ``Q_j``).  Returns ``(e_T, e_R)`` in the same coordinates.

    Reachability inside the block is propagated cell by cell, visiting only
    cells with a reachable entrance.
    """
    P_i, Q_j = as_curve(P_i), as_curve(Q_j)
    if len(monotone_breaks(P_i.vertices)) != 2 or len(monotone_breaks(Q_j.vertices)) != 2:
        raise ValueError("block_propagate expects monotone pieces")
    if e_B is None and e_L is None:
        return None, None
    a, b = P_i.n - 1, Q_j.n - 1
    grid = FreeSpaceGrid(P_i, Q_j, delta)
    bottom_in = _split_side(e_B, a)
    left_in = _split_side(e_L, b)
    top_out: list[Interval] = []
    right_out: list[Interval] = []
    # column sweep; `active` maps a row to the reachable left side of its cell
    active: dict[int, Interval] = dict(left_in)
    for i in range(a):
        below: Side = bottom_in.get(i)
        nxt: dict[int, Interval] = {}
        if active or below is not None:
            last_row = max(active) if active else -1
            j = 0 if below is not None else min(active)
            while j < b:
                lft = active.get(j)
                if lft is None and below is None:
                    if j > last_row:
                        break
                    j += 1
                    continue
                right, below = _cell_step(lft, below, grid.vert(i + 1, j), grid.horiz(i, j + 1))
                if right is not None:
                    nxt[j] = right
                j += 1
            if below is not None and j == b:
                top_out.append((i + below[0], i + below[1]))
        active = nxt
    for j, iv in active.items():
        right_out.append((j + iv[0], j + iv[1]))
    return _single(top_out, "top"), _single(right_out, "right")


def _split_side(iv: Side, length: int) -> dict[int, Interval]:
    """Cut a position interval along a side into per-edge fractions."""
    out: dict[int, Interval] = {}
    if iv is None:
        return out
    lo, hi = iv
    for k in range(max(0, int(np.floor(lo))), min(length, int(np.ceil(hi)) + 1)):
        a, b = max(lo, k), min(hi, k + 1)
        if a <= b and k < length:
            out[k] = (a - k, b - k)
    return out
