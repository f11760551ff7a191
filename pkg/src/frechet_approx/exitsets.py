"""Approximate exit sets for one-dimensional curves.

An exit set maps entrance points on the left boundary ``x = 0`` of the
free-space diagram to the right-boundary points reachable from them.  An
``(a, delta)``-exit set contains every ``delta``-reachable exit and only
exits that are ``a * delta``-reachable.  All boundary sets are unions of
closed intervals of float positions along ``Q``.

The constructions work on three levels:

* a single directed segment against ``Q`` (band queries on ``Q``),
* a subcurve of ``P`` whose interior signature vertices stay away from the
  grid boundaries (segment, label matching, segment),
* an arbitrary ``P``, cut at its signature vertices that are close to the
  grid boundaries.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curves import Curve, CurveParam, as_curve, value_at
from .freespace import exact_reachable_right_boundary, free_interval_arrays
from .intervals import IntervalUnion, intersect, normalize
from .signatures import Signature, compute_signature


def _pos(p) -> float:
    return p.position() if isinstance(p, CurveParam) else float(p)


def _values(curve) -> np.ndarray:
    c = as_curve(curve)
    if c.d != 1:
        raise ValueError("expected a one-dimensional curve")
    return np.asarray(c.values, dtype=float)


# ---------------------------------------------------------------------------
# grids and shifts


@dataclass(frozen=True)
class Grid:
    """Cells ``[shift + k w, shift + (k + 1) w)`` labelled by ``k``."""

    cell_width: float
    shift: float = 0.0

    def __post_init__(self) -> None:
        if not self.cell_width > 0:
            raise ValueError("cell_width must be positive")

    def label(self, v: float) -> int:
        return int(np.floor((v - self.shift) / self.cell_width))

    def labels(self, values) -> np.ndarray:
        return np.floor((np.asarray(values, dtype=float) - self.shift) / self.cell_width).astype(np.int64)

    def cell(self, label: int) -> tuple[float, float]:
        lo = self.shift + label * self.cell_width
        return lo, lo + self.cell_width

    def boundary_distance(self, values) -> np.ndarray:
        r = np.mod(np.asarray(values, dtype=float) - self.shift, self.cell_width)
        return np.minimum(r, self.cell_width - r)

    def on_boundary(self, values) -> np.ndarray:
        x = (np.asarray(values, dtype=float) - self.shift) / self.cell_width
        return x == np.floor(x)


@dataclass(frozen=True)
class BadnessReport:
    """Recount of the vertices within ``c * delta`` of a grid boundary."""

    c: float
    bad_vertex_count: int
    bad_indices: tuple[tuple[int, ...], tuple[int, ...]]
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.bad_vertex_count <= self.bound


def badness(grid: Grid, P1d, Q1d, c: float, delta: float, alpha: float | None = None) -> BadnessReport:
    """Count c-bad vertices of both curves; ``bound`` is ``c n / alpha``."""
    p, q = np.atleast_1d(np.asarray(P1d, dtype=float)).ravel(), np.atleast_1d(np.asarray(Q1d, dtype=float)).ravel()
    bp = np.flatnonzero(grid.boundary_distance(p) <= c * delta)
    bq = np.flatnonzero(grid.boundary_distance(q) <= c * delta)
    if alpha is None:
        alpha = grid.cell_width / delta if delta > 0 else np.inf
    bound = c * (len(p) + len(q)) / alpha
    return BadnessReport(float(c), int(len(bp) + len(bq)), (tuple(map(int, bp)), tuple(map(int, bq))), float(bound))


def _arc_counts(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Number of closed circular arcs ``[a, b]`` covering each point of ``t``."""
    plain = a <= b
    a1, b1 = np.sort(a[plain]), np.sort(b[plain])
    a2, b2 = np.sort(a[~plain]), np.sort(b[~plain])
    cnt = np.searchsorted(a1, t, side="right") - np.searchsorted(b1, t, side="left")
    cnt += np.searchsorted(a2, t, side="right") + (len(b2) - np.searchsorted(b2, t, side="left"))
    return cnt


def _avoid_vertices(s: float, lo: float, hi: float, residues: np.ndarray, w: float) -> float:
    """Move ``s`` inside the open gap ``(lo, hi)`` until no vertex sits on a boundary."""
    for frac in (0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875):
        cand = lo + frac * (hi - lo) if hi > lo else s
        c = float(np.mod(cand, w))
        if not np.any(np.mod(residues - c, w) == 0.0):
            return c
    return float(np.mod(s, w))


def compute_shift(P1d, Q1d, alpha: float, delta: float, c: float) -> Grid:
    """Grid of width ``alpha delta`` whose shift minimises the c-bad vertex count.

    The bad set of a vertex ``v`` is the circular arc of shifts
    ``[v - c delta, v + c delta]`` modulo the cell width; the sweep evaluates
    the coverage on every gap between arc endpoints and keeps the least
    covered one.  The shift is then moved within its gap so that no vertex
    lies on a cell boundary.
    """
    w = alpha * delta
    if not w > 0:
        raise ValueError("alpha * delta must be positive")
    v = np.concatenate([np.atleast_1d(np.asarray(P1d, dtype=float)).ravel(),
                        np.atleast_1d(np.asarray(Q1d, dtype=float)).ravel()])
    residues = np.mod(v, w)
    rad = c * delta
    if 2.0 * rad >= w:
        pts = np.unique(residues)
    else:
        pts = np.unique(np.concatenate([np.mod(v - rad, w), np.mod(v + rad, w)]))
    nxt = np.append(pts[1:], pts[0] + w)
    mids = np.mod(0.5 * (pts + nxt), w)
    if 2.0 * rad >= w:
        k = int(np.argmax(nxt - pts))
    else:
        counts = _arc_counts(np.mod(v - rad, w), np.mod(v + rad, w), mids)
        best = counts.min()
        # widest gap among the least covered ones
        k = int(np.argmax(np.where(counts == best, nxt - pts, -1.0)))
    s = _avoid_vertices(float(mids[k]), float(pts[k]), float(nxt[k]), residues, w)
    return Grid(float(w), s)


# ---------------------------------------------------------------------------
# labels


def reduce_labels(labels: Sequence[int]) -> list[int]:
    """Collapse repeated labels and keep only the extrema of the sequence."""
    out: list[int] = []
    for x in labels:
        x = int(x)
        if out and out[-1] == x:
            continue
        if len(out) >= 2 and (out[-1] - out[-2]) * (x - out[-1]) > 0:
            out[-1] = x
            continue
        out.append(x)
    return out


@dataclass(frozen=True)
class LabelCurve:
    extrema_labels: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.extrema_labels)


def label_curve(sig: Signature | Sequence[float], grid: Grid) -> LabelCurve:
    """Extrema of the grid labels of a signature's vertex values."""
    vals = np.asarray(sig.values if isinstance(sig, Signature) else sig, dtype=float)
    if np.any(grid.on_boundary(vals)):
        raise ValueError("a signature vertex lies on a grid boundary")
    return LabelCurve(tuple(reduce_labels(grid.labels(vals))))


class SubstringEqDS:
    """Exact substring equality between two integer strings.

    Polynomial prefix hashes modulo a Mersenne prime answer most queries;
    a hash match is confirmed by direct comparison so answers are exact.
    """

    _MOD = (1 << 61) - 1
    _BASE = 0x9E3779B97F4A7C15 % ((1 << 61) - 1)

    def __init__(self, A: Sequence[int], B: Sequence[int]) -> None:
        self.A = np.asarray(A, dtype=np.int64)
        self.B = np.asarray(B, dtype=np.int64)
        n = max(len(self.A), len(self.B)) + 1
        pw = [1] * n
        for i in range(1, n):
            pw[i] = pw[i - 1] * self._BASE % self._MOD
        self._pow = pw
        self._pa = self._prefix(self.A)
        self._pb = self._prefix(self.B)

    def _prefix(self, s: np.ndarray) -> list[int]:
        h = [0] * (len(s) + 1)
        for i, x in enumerate(s.tolist()):
            h[i + 1] = (h[i] * self._BASE + (x % self._MOD) + 1) % self._MOD
        return h

    def _hash(self, pre: list[int], i: int, j: int) -> int:
        return (pre[j] - pre[i] * self._pow[j - i]) % self._MOD

    def equal(self, rangeA: tuple[int, int], rangeB: tuple[int, int]) -> bool:
        (i, j), (k, l) = rangeA, rangeB
        if not (0 <= i <= j <= len(self.A) and 0 <= k <= l <= len(self.B)):
            raise IndexError("substring range out of bounds")
        if j - i != l - k:
            return False
        if self._hash(self._pa, i, j) != self._hash(self._pb, k, l):
            return False
        return bool(np.array_equal(self.A[i:j], self.B[k:l]))


def substring_eq(ds: SubstringEqDS, rangeA: tuple[int, int], rangeB: tuple[int, int]) -> bool:
    """``A[i:j] == B[k:l]`` for half-open ranges."""
    return ds.equal(rangeA, rangeB)


# ---------------------------------------------------------------------------
# range successor and band queries on Q


class RangeSuccessorDS:
    """Smallest vertex index ``j >= start`` with ``lo <= q_j <= hi``.

    A segment tree over the vertices sorted by value; each node keeps the
    sorted vertex indices of its subtree, so a query decomposes the value
    range into logarithmically many nodes and binary-searches each.
    """

    def __init__(self, values) -> None:
        v = np.asarray(values, dtype=float).ravel()
        self.values = v
        n = len(v)
        order = np.argsort(v, kind="stable")
        self._sorted = v[order]
        size = 1
        while size < max(n, 1):
            size *= 2
        self._size = size
        empty = np.empty(0, dtype=np.int64)
        tree = [empty] * (2 * size)
        for k in range(n):
            tree[size + k] = order[k:k + 1].astype(np.int64)
        for node in range(size - 1, 0, -1):
            tree[node] = np.sort(np.concatenate((tree[2 * node], tree[2 * node + 1])))
        self._tree = tree

    def __len__(self) -> int:
        return len(self.values)

    def successor(self, start: int, lo: float = -np.inf, hi: float = np.inf) -> int | None:
        l = int(np.searchsorted(self._sorted, lo, side="left")) + self._size
        r = int(np.searchsorted(self._sorted, hi, side="right")) + self._size
        best = None
        tree = self._tree
        while l < r:
            if l & 1:
                best = self._check(tree[l], start, best)
                l += 1
            if r & 1:
                r -= 1
                best = self._check(tree[r], start, best)
            l >>= 1
            r >>= 1
        return best

    @staticmethod
    def _check(arr: np.ndarray, start: int, best: int | None) -> int | None:
        k = int(np.searchsorted(arr, start, side="left"))
        if k < len(arr):
            cand = int(arr[k])
            if best is None or cand < best:
                return cand
        return best


def _crossing(v: np.ndarray, start: float, j: int, level: float) -> float:
    """Position on the stretch from ``start`` to vertex ``j`` where the value is ``level``."""
    a = value_at(v, start)
    b = v[j]
    t = 0.0 if b == a else (level - a) / (b - a)
    t = min(max(t, 0.0), 1.0)
    return min(start + t * (j - start), float(j))


def first_point_within(ds: RangeSuccessorDS, p: float, eps: float, start) -> float | None:
    """Earliest position ``>= start`` whose value lies in ``[p - eps, p + eps]``."""
    v = ds.values
    pos = _pos(start)
    q = value_at(v, pos)
    if abs(q - p) <= eps:
        return pos
    j0 = int(np.floor(pos)) + 1
    if j0 >= len(v):
        return None
    if q > p + eps:
        level = p + eps
        j = ds.successor(j0, hi=level)
    else:
        level = p - eps
        j = ds.successor(j0, lo=level)
    if j is None:
        return None
    return _crossing(v, max(pos, j - 1.0), j, level)


def maximal_interval_within(ds: RangeSuccessorDS, p: float, eps: float, y1) -> float:
    """Largest ``y2`` such that ``Q[y1, y2]`` stays within ``eps`` of ``p``."""
    v = ds.values
    pos = _pos(y1)
    q = value_at(v, pos)
    slack = 1e-9 * max(1.0, abs(p), eps)
    if abs(q - p) > eps + slack:
        raise ValueError("start point is not within eps of p")
    j0 = int(np.floor(pos)) + 1
    if j0 >= len(v):
        return float(len(v) - 1)
    up = ds.successor(j0, lo=np.nextafter(p + eps, np.inf))
    down = ds.successor(j0, hi=np.nextafter(p - eps, -np.inf))
    cands = [j for j in (up, down) if j is not None]
    if not cands:
        return float(len(v) - 1)
    j = min(cands)
    level = p + eps if v[j] > p + eps else p - eps
    return max(pos, _crossing(v, max(pos, j - 1.0), j, level))


class _RangeExtrema:
    """Sparse tables for range minimum and maximum over vertex values."""

    def __init__(self, v: np.ndarray) -> None:
        self.v = v
        mins, maxs = [v.copy()], [v.copy()]
        k = 1
        while 2 * k <= len(v):
            mins.append(np.minimum(mins[-1][:-k], mins[-1][k:]))
            maxs.append(np.maximum(maxs[-1][:-k], maxs[-1][k:]))
            k *= 2
        self._mins, self._maxs = mins, maxs

    def span(self, y1: float, y2: float) -> tuple[float, float]:
        a, b = value_at(self.v, y1), value_at(self.v, y2)
        lo, hi = min(a, b), max(a, b)
        i, j = int(np.floor(y1)) + 1, int(np.ceil(y2)) - 1
        if i <= j:
            lev = (j - i + 1).bit_length() - 1
            w = 1 << lev
            lo = min(lo, self._mins[lev][i], self._mins[lev][j - w + 1])
            hi = max(hi, self._maxs[lev][i], self._maxs[lev][j - w + 1])
        return float(lo), float(hi)


# ---------------------------------------------------------------------------
# exit sets


@dataclass
class ExitSet:
    """Exit intervals (positions along Q) with their ``(guarantee, delta)`` pair."""

    intervals: IntervalUnion
    guarantee: float
    delta: float
    counters: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.intervals

    def __len__(self) -> int:
        return len(self.intervals)


def _subcurve_values(v: np.ndarray, y1: float, y2: float) -> np.ndarray:
    i, j = int(np.floor(y1)) + 1, int(np.ceil(y2)) - 1
    inner = v[i:j + 1] if i <= j else v[0:0]
    return np.concatenate(([value_at(v, y1)], inner, [value_at(v, y2)]))


def _segment_decide_values(a: float, b: float, r: np.ndarray, delta: float) -> bool:
    if a > b:
        a, b, r = -a, -b, -r
    if abs(r[0] - a) > delta or abs(r[-1] - b) > delta:
        return False
    if r.min() < a - delta or r.max() > b + delta:
        return False
    return float(np.max(np.maximum.accumulate(r) - r)) <= 2.0 * delta


def segment_subcurve_decide(e, Q, y1, y2, delta: float) -> bool:
    """Whether the directed segment ``e`` is within Frechet distance delta of ``Q[y1, y2]``.

    In one dimension a monotone segment can follow the subcurve greedily;
    this fails exactly when an endpoint is too far, the subcurve leaves the
    ``delta``-band around the segment's range, or it backtracks by more than
    ``2 delta`` against the segment's direction.
    """
    a, b = float(e[0]), float(e[1])
    y1, y2 = _pos(y1), _pos(y2)
    if y1 > y2:
        raise ValueError("y1 must not exceed y2")
    return _segment_decide_values(a, b, _subcurve_values(_values(Q), y1, y2), delta)


class _QIndex:
    """Preprocessed queries on Q: band searches and subcurve ranges."""

    def __init__(self, Q) -> None:
        self.v = _values(Q)
        self.ds = RangeSuccessorDS(self.v)
        self.rx = _RangeExtrema(self.v)

    @property
    def end(self) -> float:
        return float(len(self.v) - 1)

    def segment_exit(self, a: float, b: float, y1: float, y2: float, tol: float) -> tuple[IntervalUnion, float]:
        """Exit interval of the segment ``a -> b`` for entrances ``[y1, y2]``.

        Returns the interval (as a union) and the diameter ratio ``D``.
        """
        lo, hi = self.rx.span(y1, y2)
        D = (hi - lo) / tol if tol > 0 else (0.0 if hi == lo else np.inf)
        ys = first_point_within(self.ds, a, tol, y1)
        if ys is None or ys > y2:
            return [], D
        yf = first_point_within(self.ds, b, tol, ys)
        if yf is None:
            return [], D
        if yf <= y2:
            band = max(abs(b - a) + tol, (hi - lo) + tol)
            return [(yf, maximal_interval_within(self.ds, b, band, yf))], D
        ye = maximal_interval_within(self.ds, b, 3.0 * tol, yf)
        # the band end lies on the threshold when D = 0; allow for rounding
        thr = (D + 3.0) * tol * (1.0 + 1e-9)
        if not _segment_decide_values(a, b, _subcurve_values(self.v, ys, ye), thr):
            return [], D
        return [(yf, ye)], D


def segment_exit_set(e, Q, y1, y2, delta: float) -> ExitSet:
    """``(D + 4, delta)``-exit set of a directed segment for entrances ``{0} x [y1, y2]``.

    ``D delta`` is the diameter of ``Q[y1, y2]``.  The exits start at the
    first point after the first free entrance that is within ``delta`` of
    ``e(1)``.  If that point lies among the entrances the interval extends
    while ``Q`` stays within ``max(|e| + delta, diam + delta)`` of ``e(1)``;
    otherwise it extends while ``Q`` stays within ``3 delta`` of ``e(1)`` and
    is kept only if the segment can reach its end at ``(D + 3) delta``.
    """
    y1, y2 = _pos(y1), _pos(y2)
    if y1 > y2:
        raise ValueError("y1 must not exceed y2")
    qi = _QIndex(Q)
    iv, D = qi.segment_exit(float(e[0]), float(e[1]), y1, y2, delta)
    return ExitSet(iv, D + 4.0, delta, {"D": D})


class _LabelString:
    """Extrema of the label sequence of a curve's signature vertices.

    Each character remembers the run of equal-labelled signature vertices
    it stands for (as curve positions), so the string of any subcurve can be
    described as a few explicit characters around a substring.
    """

    def __init__(self, positions: Sequence[int], labels: Sequence[int]) -> None:
        runs: list[list[int]] = []
        for pos, lab in zip(positions, labels):
            if runs and runs[-1][0] == lab:
                runs[-1][2] = pos
            else:
                runs.append([int(lab), pos, pos])
        keep = []
        for k, run in enumerate(runs):
            if 0 < k < len(runs) - 1:
                if (run[0] - runs[k - 1][0]) * (run[0] - runs[k + 1][0]) <= 0:
                    continue
            keep.append(run)
        self.chars = np.array([r[0] for r in keep], dtype=np.int64)
        self.first = [float(r[1]) for r in keep]
        self.last = [float(r[2]) for r in keep]

    def __len__(self) -> int:
        return len(self.chars)

    def between(self, x1: float, x2: float, lx: int, lz: int) -> list:
        """Virtual string of the subcurve from ``x1`` to ``x2`` with end labels ``lx``, ``lz``."""
        k0 = bisect_right(self.last, x1)
        kl = bisect_left(self.first, x2) - 1
        ch = self.chars
        if kl - k0 + 1 <= 4:
            return [("lit", tuple(reduce_labels([lx, *ch[k0:kl + 1].tolist(), lz])))]
        head = [lx]
        e0, e1 = int(ch[k0]), int(ch[k0 + 1])
        if e0 != lx and (e0 - lx) * (e0 - e1) > 0:
            head.append(e0)
        el, ep = int(ch[kl]), int(ch[kl - 1])
        tail = [el, lz] if el != lz and (el - lz) * (el - ep) > 0 else [lz]
        return [("lit", tuple(head)), ("str", k0 + 1, kl), ("lit", tuple(tail))]

    def forward(self, y: float, ly: int) -> tuple[list[tuple[int, float, float]], int]:
        """Head of the string of ``Q[y, ...]`` plus the index where the plain substring resumes.

        Head entries are ``(label, run_first, run_last)``.
        """
        k0 = bisect_right(self.last, y)
        ch = self.chars
        head = [(ly, y, y)]
        if k0 >= len(ch):
            return head, k0
        e0 = int(ch[k0])
        if e0 == ly:
            head[0] = (ly, y, self.last[k0])
        elif k0 + 1 >= len(ch) or (e0 - ly) * (e0 - int(ch[k0 + 1])) > 0:
            head.append((e0, self.first[k0], self.last[k0]))
        return head, k0 + 1


def _vlen(vs: list) -> int:
    return sum(len(s[1]) if s[0] == "lit" else s[2] - s[1] for s in vs)


def _vtake(vs: list, n: int) -> list:
    out = []
    for s in vs:
        if n <= 0:
            break
        if s[0] == "lit":
            out.append(("lit", s[1][:n]))
            n -= len(out[-1][1])
        else:
            stop = min(s[2], s[1] + n)
            out.append(("str", s[1], stop))
            n -= stop - s[1]
    return out


def _vequal(ds: SubstringEqDS, u: list, w: list) -> bool:
    """Compare a virtual string over ``ds.A`` with one over ``ds.B``."""
    if _vlen(u) != _vlen(w):
        return False

    def chunks(vs):
        for s in vs:
            if s[0] == "lit":
                if s[1]:
                    yield ["lit", list(s[1])]
            elif s[2] > s[1]:
                yield ["str", s[1], s[2]]

    cu, cw = list(chunks(u)), list(chunks(w))
    i = j = 0
    while i < len(cu) and j < len(cw):
        a, b = cu[i], cw[j]
        la = len(a[1]) if a[0] == "lit" else a[2] - a[1]
        lb = len(b[1]) if b[0] == "lit" else b[2] - b[1]
        m = min(la, lb)
        if a[0] == "str" and b[0] == "str":
            if not ds.equal((a[1], a[1] + m), (b[1], b[1] + m)):
                return False
        else:
            xa = a[1][:m] if a[0] == "lit" else ds.A[a[1]:a[1] + m].tolist()
            xb = b[1][:m] if b[0] == "lit" else ds.B[b[1]:b[1] + m].tolist()
            if list(xa) != list(xb):
                return False
        for c, l in ((a, la), (b, lb)):
            if c[0] == "lit":
                c[1] = c[1][m:]
            else:
                c[1] += m
        if m == la:
            i += 1
        if m == lb:
            j += 1
    return True


class LabelMatcher:
    """Label strings of ``Sigma_delta(P)`` and ``Sigma_2delta(Q)`` on a fixed grid."""

    def __init__(self, P, Q, grid: Grid, delta: float, sig_p: Signature | None = None,
                 sig_q: Signature | None = None, qindex: _QIndex | None = None) -> None:
        self.pv = _values(P)
        self.qv = _values(Q)
        self.grid = grid
        self.delta = delta
        self.sig_p = sig_p or compute_signature(self.pv, delta)
        self.sig_q = sig_q or compute_signature(self.qv, 2.0 * delta)
        self.A = _LabelString(self.sig_p.indices, grid.labels(self.sig_p.values))
        self.B = _LabelString(self.sig_q.indices, grid.labels(self.sig_q.values))
        self.ds = SubstringEqDS(self.A.chars, self.B.chars)
        self.qi = qindex or _QIndex(self.qv)

    def target(self, x1: float, x2: float) -> list:
        lx = self.grid.label(value_at(self.pv, x1))
        if x2 <= x1:
            return [("lit", (lx,))]
        return self.A.between(x1, x2, lx, self.grid.label(value_at(self.pv, x2)))

    def interval(self, x1: float, x2: float, y: float) -> tuple[float, float] | None:
        T = self.target(x1, x2)
        r = _vlen(T)
        ly = self.grid.label(value_at(self.qv, y))
        last = T[-1][1][-1]
        head, k = self.B.forward(y, ly)
        n_b = len(self.B)
        G = [("lit", tuple(h[0] for h in head)), ("str", k, n_b)]
        if _vlen(G) < r - 1:
            return None
        if not _vequal(self.ds, _vtake(T, r - 1), _vtake(G, r - 1)):
            return None
        lo, hi = self.grid.cell(last)
        mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
        if r == 1:
            if ly != last:
                return None
            start = y
        else:
            idx = r - 2
            start = head[idx][2] if idx < len(head) else self.B.last[k + idx - len(head)]
        idx = r
        if idx < len(head):
            stop = head[idx][1]
        elif k + idx - len(head) < n_b:
            stop = self.B.first[k + idx - len(head)]
        else:
            stop = self.qi.end
        y_lo = first_point_within(self.qi.ds, mid, rad, start)
        if y_lo is None or y_lo > stop:
            return None
        return y_lo, maximal_interval_within(self.qi.ds, mid, rad, y_lo)


def matching_label_interval(P, Q, x1, x2, y, grid: Grid, delta: float,
                            matcher: LabelMatcher | None = None) -> tuple[float, float] | None:
    """Interval of ``y'`` whose subcurve ``Q[y, y']`` has the label string of ``P[x1, x2]``.

    Three tests: the first labels agree, the inner characters of ``P``'s
    string equal the same number of characters of ``Q``'s string after
    ``Q(y)``, and ``Q(y')`` lies in the cell of the last label.
    """
    m = matcher or LabelMatcher(P, Q, grid, delta)
    return m.interval(_pos(x1), _pos(x2), _pos(y))


class ExitSetBuilder:
    """Preprocessed ``P``, ``Q`` and grid for repeated exit-set queries.

    ``alpha`` is the grid parameter: cells are ``alpha * delta`` wide and
    interior-good exit sets carry the guarantee ``alpha + 7``.
    """

    GOOD_C = 6.0
    SHIFT_C = 7.0

    def __init__(self, P, Q, alpha: float, delta: float, grid: Grid | None = None) -> None:
        if delta <= 0:
            raise ValueError("delta must be positive")
        self.pv = _values(P)
        self.qv = _values(Q)
        self.alpha = float(alpha)
        self.delta = float(delta)
        self.sig_p = compute_signature(self.pv, delta)
        self.sig_q = compute_signature(self.qv, 2.0 * delta)
        if grid is None:
            grid = compute_shift(np.asarray(self.sig_p.values), self.qv, alpha, delta, self.SHIFT_C)
        self.grid = grid
        self.qi = _QIndex(self.qv)
        self.matcher = LabelMatcher(self.pv, self.qv, grid, delta, self.sig_p, self.sig_q, self.qi)
        self._qsorted = np.argsort(self.qv, kind="stable")
        self._qsorted_vals = self.qv[self._qsorted]

    def is_bad(self, sig_index: int) -> bool:
        v = self.sig_p.values[sig_index]
        return bool(self.grid.boundary_distance([v])[0] <= self.GOOD_C * self.delta)

    def bad_signature_indices(self) -> list[int]:
        k = len(self.sig_p)
        return [0] + [i for i in range(1, k - 1) if self.is_bad(i)] + [k - 1]

    def interior_good(self, a: int, b: int, y: float) -> IntervalUnion:
        """Exit interval of ``P[s_a, s_b]`` for the single entrance ``y``."""
        s = self.sig_p.indices
        if any(self.is_bad(i) for i in range(a + 1, b)):
            raise ValueError("subcurve has a bad interior signature vertex")
        pv, tol = self.pv, 2.0 * self.delta
        if b == a + 1:
            iv, _ = self.qi.segment_exit(pv[s[a]], pv[s[b]], y, y, tol)
            return iv
        si, sj = s[a + 1], s[b - 1]
        first, _ = self.qi.segment_exit(pv[s[a]], pv[si], y, y, tol)
        if not first:
            return []
        mid = self.matcher.interval(float(si), float(sj), first[0][0])
        if mid is None:
            return []
        last, _ = self.qi.segment_exit(pv[sj], pv[s[b]], mid[0], mid[1], tol)
        return last

    def passages(self, sig_index: int) -> IntervalUnion:
        """Free positions on Q for a signature vertex, on edges with an endpoint within delta.

        The second and second-to-last signature vertices neighbour an end of
        ``P`` whose partner on ``Q`` may lie inside an edge, so for them every
        free position is kept.
        """
        sigma = self.sig_p.values[sig_index]
        m = len(self.qv)
        if sig_index in (1, len(self.sig_p) - 2):
            edges = np.arange(m - 1)
        else:
            lo = int(np.searchsorted(self._qsorted_vals, sigma - self.delta, side="left"))
            hi = int(np.searchsorted(self._qsorted_vals, sigma + self.delta, side="right"))
            near = self._qsorted[lo:hi]
            edges = np.unique(np.concatenate([near - 1, near]))
            edges = edges[(edges >= 0) & (edges <= m - 2)]
        if len(edges) == 0:
            return []
        A = self.qv[edges][:, None]
        B = self.qv[edges + 1][:, None]
        C = np.full_like(A, sigma)
        f_lo, f_hi = free_interval_arrays(A, B, C, self.delta)
        return normalize((e + a, e + b) for e, a, b in zip(edges.tolist(), f_lo, f_hi) if a <= b)

    def left_free(self, S: IntervalUnion) -> IntervalUnion:
        m = len(self.qv)
        e = np.arange(m - 1)
        f_lo, f_hi = free_interval_arrays(self.qv[:-1, None], self.qv[1:, None],
                                          np.full((m - 1, 1), self.pv[0]), self.delta)
        free = normalize((j + a, j + b) for j, a, b in zip(e.tolist(), f_lo, f_hi) if a <= b)
        return intersect(normalize(S), free)

    def general(self, S: IntervalUnion) -> tuple[IntervalUnion, dict]:
        bad = self.bad_signature_indices()
        current = self.left_free(S)
        counters = {"bad_signature_vertices": len(bad) - 2, "components": 0, "interior_calls": 0}
        for a, b in zip(bad, bad[1:]):
            if not current:
                return [], counters
            counters["components"] += len(current)
            parts = []
            for lo, _ in current:
                parts.extend(self.interior_good(a, b, lo))
                counters["interior_calls"] += 1
            E = normalize(parts)
            if b == bad[-1]:
                return E, counters
            current = intersect(E, self.passages(b))
        return [], counters


def interior_good_exit_set(P, span: tuple[int, int], Q, z, alpha: float, delta: float,
                           grid: Grid | None = None, builder: ExitSetBuilder | None = None) -> ExitSet:
    """``(alpha + 7, delta)``-exit set of ``P[s_a, s_b]`` for the entrance ``{(0, z)}``.

    ``span = (a, b)`` indexes the delta-signature of ``P``; all signature
    vertices strictly between ``a`` and ``b`` must be 6-good.  Positions of
    the result are along the whole of ``Q``.
    """
    bld = builder or ExitSetBuilder(P, Q, alpha, delta, grid)
    a, b = span
    if not 0 <= a < b < len(bld.sig_p):
        raise ValueError("span must index two distinct signature vertices")
    return ExitSet(bld.interior_good(a, b, _pos(z)), alpha + 7.0, delta)


def general_exit_set(P, Q, S: IntervalUnion, alpha: float, delta: float) -> ExitSet:
    """``(alpha, delta)``-exit set of ``P`` and ``Q`` for the entrance set ``S``.

    For ``alpha < 8`` (or ``delta = 0``) the exact reachable set is returned.
    Otherwise ``P`` is cut at its signature vertices near grid boundaries
    (cells ``(alpha - 7) delta`` wide); between cuts the interior-good
    construction runs once per entrance component and its output is
    intersected with the places where the next cut vertex can be matched.
    """
    P, Q = as_curve(P), as_curve(Q)
    if P.d != 1 or Q.d != 1:
        raise ValueError("exit sets are implemented for one-dimensional curves")
    S = normalize(S)
    if not S:
        return ExitSet([], alpha, delta)
    if alpha < 8 or delta <= 0:
        return ExitSet(exact_reachable_right_boundary(P, Q, S, delta), alpha, delta, {"exact": True})
    bld = ExitSetBuilder(P, Q, alpha - 7.0, delta)
    iv, counters = bld.general(S)
    return ExitSet(iv, alpha, delta, counters)
