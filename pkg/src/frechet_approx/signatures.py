"""Signatures of one-dimensional curves.

A ``delta``-signature keeps the extrema of a curve that survive wiggles of
amplitude ``2 delta`` (``delta`` at the two ends).  The construction is a
single hysteresis scan; its output is checked against the defining
properties and a pruning fallback takes over if the check fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import as_curve, monotone_breaks


@dataclass(frozen=True)
class Signature:
    delta: float
    indices: tuple[int, ...]
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.indices)


def _make(v: np.ndarray, delta: float, idx) -> Signature:
    idx = tuple(int(i) for i in idx)
    return Signature(float(delta), idx, tuple(float(v[i]) for i in idx))


def _scan(v: np.ndarray, delta: float) -> list[int]:
    n = len(v)
    if n == 2:
        return [0, 1]
    start = v[0]
    k = 1
    while k < n and abs(v[k] - start) <= delta:
        k += 1
    if k == n:
        return [0, n - 1]
    up = v[k] > start
    out = [0]
    cand = k
    for j in range(k + 1, n):
        x = v[j]
        if up:
            if x > v[cand]:
                cand = j
            elif v[cand] - x > 2.0 * delta:
                out.append(cand)
                up, cand = False, j
        else:
            if x < v[cand]:
                cand = j
            elif x - v[cand] > 2.0 * delta:
                out.append(cand)
                up, cand = True, j
    if cand != n - 1 and abs(v[n - 1] - v[cand]) > delta:
        out.append(cand)
    out.append(n - 1)
    return out


def _max_backtrack(seg: np.ndarray, rising: bool) -> float:
    """Largest move against the given direction within a vertex run."""
    if rising:
        running = np.maximum.accumulate(seg)
        return float(np.max(running - seg))
    running = np.minimum.accumulate(seg)
    return float(np.max(seg - running))


def verify_signature(P1d, delta: float, sig: Signature | tuple | list) -> bool:
    """Check the four defining properties by direct scans."""
    v = np.asarray(as_curve(P1d).values, dtype=float)
    n = len(v)
    s = list(sig.indices if isinstance(sig, Signature) else sig)
    k = len(s)
    if k < 2 or s[0] != 0 or s[-1] != n - 1 or any(b <= a for a, b in zip(s, s[1:])):
        return False
    vals = v[s]
    # non-degeneracy
    for i in range(1, k - 1):
        if (vals[i] - vals[i - 1]) * (vals[i] - vals[i + 1]) <= 0:
            return False
    for i in range(k - 1):
        a, b = vals[i], vals[i + 1]
        seg = v[s[i]:s[i + 1] + 1]
        # direction preservation
        if a < b and _max_backtrack(seg, True) > 2.0 * delta:
            return False
        if a > b and _max_backtrack(seg, False) > 2.0 * delta:
            return False
        # minimum edge length
        if k > 2:
            outer = i == 0 or i == k - 2
            if abs(b - a) <= (delta if outer else 2.0 * delta):
                return False
        # range
        lo, hi = min(a, b), max(a, b)
        inside = (seg >= lo) & (seg <= hi)
        if k == 2:
            inside |= np.abs(seg - a) <= delta
            inside |= np.abs(seg - b) <= delta
        elif i == 0:
            inside |= np.abs(seg - a) <= delta
        elif i == k - 2:
            inside |= np.abs(seg - b) <= delta
        if not np.all(inside):
            return False
    return True


def _prune_fallback(v: np.ndarray, delta: float) -> list[int]:
    """Repeatedly drop the shortest offending edge until the properties hold."""
    s = list(monotone_breaks(v[:, None]))
    while len(s) > 2 and not verify_signature(v, delta, s):
        lengths = [abs(v[s[i + 1]] - v[s[i]]) for i in range(len(s) - 1)]
        i = int(np.argmin(lengths))
        drop = {s[i], s[i + 1]} - {0, len(v) - 1}
        s = [x for x in s if x not in drop]
        # restore strict alternation
        keep = [s[0]]
        for x in s[1:-1]:
            keep.append(x)
            while len(keep) >= 3:
                a, b, c = v[keep[-3]], v[keep[-2]], v[keep[-1]]
                if (b - a) * (b - c) > 0:
                    break
                mid = keep[-2]
                keep.remove(mid)
        keep.append(s[-1])
        while len(keep) >= 3 and (v[keep[-2]] - v[keep[-3]]) * (v[keep[-2]] - v[keep[-1]]) <= 0:
            del keep[-2]
        s = keep
    return s


def compute_signature(P1d, delta: float) -> Signature:
    """The ``delta``-signature of a 1D curve (earliest index on ties)."""
    v = np.asarray(as_curve(P1d).values, dtype=float)
    if delta < 0:
        raise ValueError("delta must be non-negative")
    idx = _scan(v, delta)
    if not verify_signature(v, delta, idx):
        idx = _prune_fallback(v, delta)
        if not verify_signature(v, delta, idx):
            raise RuntimeError("could not construct a valid signature")
    return _make(v, delta, idx)
