"""Polygonal curves under the L-infinity norm.

A curve is an ordered vertex array of shape ``(n, d)``.  Points on a curve
are addressed either by a :class:`CurveParam` ``(edge, t)`` or by a float
*position* ``edge + t`` in ``[0, n - 1]``.  Positions are what the interval
arithmetic in the rest of the package works with; integer positions are
exactly the vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray


class InvalidParameterError(ValueError):
    """Raised for curve parameters outside the curve's domain."""


@dataclass(frozen=True)
class CurveParam:
    """A point of a curve's domain: fraction ``t`` along edge ``edge``."""

    edge: int
    t: float

    @classmethod
    def from_position(cls, pos: float, n: int) -> "CurveParam":
        if not 0.0 <= pos <= n - 1:
            raise InvalidParameterError(f"position {pos} outside [0, {n - 1}]")
        edge = min(int(np.floor(pos)), n - 2)
        return cls(edge, float(pos - edge))

    def position(self) -> float:
        return self.edge + self.t

    def display(self, n: int) -> float:
        """Global parameter in [0, 1], for reports only."""
        return (self.edge + self.t) / (n - 1)


@dataclass(frozen=True)
class Curve:
    """Immutable polygonal curve with at least two vertices."""

    vertices: NDArray[np.float64] = field(repr=False)

    def __init__(self, vertices) -> None:
        arr = np.array(vertices, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("vertices must be a nonempty (n, d) array")
        if arr.shape[0] == 1:
            arr = np.vstack([arr, arr])
        if not np.all(np.isfinite(arr)):
            raise ValueError("vertex coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @property
    def d(self) -> int:
        return self.vertices.shape[1]

    @property
    def values(self) -> NDArray[np.float64]:
        """Vertex values of a one-dimensional curve."""
        if self.d != 1:
            raise ValueError("values is only defined for 1D curves")
        return self.vertices[:, 0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Curve(n={self.n}, d={self.d}, vertices={self.vertices.tolist()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Curve) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self) -> int:
        return hash(self.vertices.tobytes())

    def at(self, pos: float) -> NDArray[np.float64]:
        """Point at float position ``pos`` in ``[0, n - 1]``."""
        return eval_curve(self, CurveParam.from_position(pos, self.n))

    def sub(self, a: float, b: float) -> "Curve":
        """Subcurve between positions ``a <= b`` as a new curve."""
        if a > b:
            raise InvalidParameterError("subcurve start after end")
        pts = [self.at(a)]
        for k in range(int(np.floor(a)) + 1, int(np.ceil(b))):
            pts.append(self.vertices[k])
        pts.append(self.at(b))
        return Curve(np.array(pts))

    def reversed(self) -> "Curve":
        return Curve(self.vertices[::-1])


def as_curve(obj) -> Curve:
    return obj if isinstance(obj, Curve) else Curve(obj)


def eval_curve(curve: Curve, p: CurveParam) -> NDArray[np.float64]:
    """Linear interpolation ``(1 - t) v[i] + t v[i + 1]``."""
    n = curve.n
    if not 0 <= p.edge <= n - 2 or not 0.0 <= p.t <= 1.0:
        raise InvalidParameterError(f"invalid parameter {p} for curve with {n} vertices")
    if p.t == 1.0 and p.edge != n - 2:
        raise InvalidParameterError("t = 1 is only canonical on the last edge")
    v = curve.vertices
    if p.t == 0.0:
        return v[p.edge].copy()
    if p.t == 1.0:
        return v[p.edge + 1].copy()
    return (1.0 - p.t) * v[p.edge] + p.t * v[p.edge + 1]


def linf_dist(p, q) -> float:
    """Maximum absolute coordinate difference."""
    a = np.atleast_1d(np.asarray(p, dtype=float))
    b = np.atleast_1d(np.asarray(q, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b)))


def project(curve: Curve, axis: int) -> Curve:
    """One-dimensional curve of the ``axis``-th coordinates."""
    if not 0 <= axis < curve.d:
        raise ValueError(f"axis {axis} out of range for dimension {curve.d}")
    return Curve(curve.vertices[:, axis])


@dataclass(frozen=True)
class MonotonePieces:
    """Greedy decomposition into maximal coordinate-wise monotone subcurves."""

    breakpoints: tuple[CurveParam, ...]

    @property
    def vertex_indices(self) -> list[int]:
        return [bp.edge + int(bp.t) for bp in self.breakpoints]

    def __len__(self) -> int:
        return len(self.breakpoints) - 1


def monotone_breaks(vertices: NDArray[np.float64]) -> list[int]:
    """Vertex indices delimiting the maximal monotone pieces (ends included)."""
    n = len(vertices)
    deltas = np.diff(vertices, axis=0)
    d = vertices.shape[1]
    breaks = [0]
    sign = np.zeros(d)
    for k in range(n - 1):
        s = np.sign(deltas[k])
        if np.any(sign * s < 0):
            breaks.append(k)
            sign = s.copy()
        else:
            sign = np.where(sign == 0, s, sign)
    breaks.append(n - 1)
    return breaks


def monotone_pieces(curve: Curve) -> MonotonePieces:
    """Breakpoints where some coordinate's direction reverses.

    A coordinate that has stayed constant so far is compatible with either
    direction; its direction is fixed by its first nonzero delta.
    """
    n = curve.n
    return MonotonePieces(
        tuple(CurveParam.from_position(float(k), n) for k in monotone_breaks(curve.vertices))
    )


def collapse_degenerate_1d(curve: Curve) -> Curve:
    """Keep only monotone-piece endpoints of a 1D curve."""
    if curve.d != 1:
        raise ValueError("collapse_degenerate_1d expects a 1D curve")
    v = curve.values
    idx = monotone_breaks(curve.vertices)
    return Curve(v[idx])


def subcurve_diameter_1d(curve: Curve, a: CurveParam, b: CurveParam) -> float:
    """Range (max minus min) of a 1D curve over the subcurve from a to b."""
    if curve.d != 1:
        raise ValueError("subcurve_diameter_1d expects a 1D curve")
    return diameter_between(curve.values, a.position(), b.position())


def value_at(values: Sequence[float] | NDArray, pos: float) -> float:
    """Value of a 1D vertex sequence at float position ``pos``."""
    n = len(values)
    k = min(int(pos), n - 2)
    t = pos - k
    if t == 0.0:
        return float(values[k])
    if t == 1.0:
        return float(values[k + 1])
    return float((1.0 - t) * values[k] + t * values[k + 1])


def diameter_between(values, a: float, b: float) -> float:
    if a > b:
        raise InvalidParameterError("subcurve start after end")
    lo_k, hi_k = int(np.floor(a)) + 1, int(np.ceil(b))
    pts = [value_at(values, a), value_at(values, b)]
    if hi_k > lo_k:
        inner = np.asarray(values[lo_k:hi_k], dtype=float)
        pts.extend([float(inner.min()), float(inner.max())])
    return max(pts) - min(pts)


def positions_range(values, a: float, b: float) -> tuple[float, float]:
    """(min, max) value of a 1D vertex sequence over positions [a, b]."""
    lo_k, hi_k = int(np.floor(a)) + 1, int(np.ceil(b))
    pts = [value_at(values, a), value_at(values, b)]
    for k in range(lo_k, hi_k):
        pts.append(float(values[k]))
    return min(pts), max(pts)
