"""Closed-interval unions on the real line.

An interval is a ``(lo, hi)`` tuple with ``lo <= hi``; single points are
kept as degenerate intervals.  A union is a sorted list of disjoint
intervals.
"""

from __future__ import annotations

from typing import Iterable, Optional

Interval = tuple[float, float]
IntervalUnion = list[Interval]


def normalize(intervals: Iterable[Optional[Interval]]) -> IntervalUnion:
    """Sort and merge touching or overlapping intervals; drop empties."""
    items = sorted((float(a), float(b)) for iv in intervals if iv is not None for a, b in [iv] if a <= b)
    out: IntervalUnion = []
    for a, b in items:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def intersect(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    """Intersection of two normalized unions by a merge scan."""
    out: IntervalUnion = []
    i = j = 0
    while i < len(u) and j < len(v):
        lo = max(u[i][0], v[j][0])
        hi = min(u[i][1], v[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if u[i][1] < v[j][1]:
            i += 1
        else:
            j += 1
    return normalize(out)


def clip(u: IntervalUnion, lo: float, hi: float) -> IntervalUnion:
    return intersect(u, [(lo, hi)])


def contains_point(u: IntervalUnion, x: float, tol: float = 0.0) -> bool:
    return any(a - tol <= x <= b + tol for a, b in u)


def is_subset(inner: IntervalUnion, outer: IntervalUnion, tol: float = 0.0) -> bool:
    """True if every interval of ``inner`` lies in one interval of ``outer`` (up to tol)."""
    padded = normalize((a - tol, b + tol) for a, b in outer)
    for a, b in inner:
        if not any(c <= a and b <= d for c, d in padded):
            return False
    return True


def total_length(u: IntervalUnion) -> float:
    return sum(b - a for a, b in u)
