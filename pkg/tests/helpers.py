"""Seeded instance generators shared by the tests."""

import numpy as np

from frechet_approx.curves import value_at
from frechet_approx.exitsets import ExitSetBuilder


def walk(rng, n, d=None, scale=1.0):
    shape = n if d is None else (n, d)
    return np.cumsum(rng.normal(0.0, scale, shape), axis=0)


def near_pair(rng, n, m, d=None, noise=0.3):
    """P is a random walk; Q resamples P at sorted random positions and adds noise."""
    P = walk(rng, n, d)
    t = np.sort(rng.uniform(0, n - 1, m))
    t[0], t[-1] = 0.0, n - 1
    if d is None:
        Q = np.interp(t, np.arange(n), P)
    else:
        Q = np.column_stack([np.interp(t, np.arange(n), P[:, k]) for k in range(d)])
    return P, Q + rng.normal(0.0, noise, Q.shape)


def random_pair(rng, nmax, d=None, nmin=2):
    n = int(rng.integers(nmin, nmax + 1))
    m = int(rng.integers(nmin, nmax + 1))
    if rng.random() < 0.5:
        return near_pair(rng, n, m, d)
    return walk(rng, n, d), walk(rng, m, d)


def interior_instances(rng, count, alpha_choices=(8.0, 12.0, 20.0)):
    """Spans between consecutive cut signature vertices, with a free entrance."""
    out = []
    while len(out) < count:
        n, m = int(rng.integers(3, 49)), int(rng.integers(3, 49))
        P, Q = near_pair(rng, n, m)
        scale = float(rng.choice([1.0, 5.0]))
        P, Q = scale * P, scale * Q
        alpha = float(rng.choice(alpha_choices))
        d = float(rng.uniform(0.05, 1.0)) * scale
        bld = ExitSetBuilder(P, Q, alpha, d)
        cuts = bld.bad_signature_indices()
        k = int(rng.integers(0, len(cuts) - 1))
        a, b = cuts[k], cuts[k + 1]
        start = P[bld.sig_p.indices[a]]
        free = [y for y in np.linspace(0, m - 1, 200) if abs(value_at(Q, y) - start) <= d]
        if not free:
            continue
        out.append((P, Q, bld, (a, b), float(rng.choice(free)), alpha, d))
    return out


ACCEPTANCE_LINES: list[str] = []


def record(number, passed, detail):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed
