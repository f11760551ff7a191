import numpy as np
import pytest
from helpers import random_pair

from frechet_approx.curves import collapse_degenerate_1d, Curve
from frechet_approx.decider_1d import approx_frechet_1d, fast_decide_1d, rectangle_cover
from frechet_approx.freespace import exact_decide, reachable_cells
from frechet_approx.oracle import exact_frechet
from frechet_approx.smoothing import short_pieces, simplify_report


def test_rectangle_cover_band():
    for cx, cy, K in [(10, 10, 3), (7, 12, 2), (12, 7, 5), (1, 1, 1), (20, 20, 1)]:
        cov = rectangle_cover(cx, cy, K)
        for i in range(cx):
            for j in range(cy):
                if abs(i - j) <= K:
                    assert cov.covers(i, j)
        xs = [(x0, x1) for x0, x1, _, _ in cov.rects]
        assert xs[0][0] == 0 and xs[-1][1] == cx
        assert all(a[1] == b[0] for a, b in zip(xs, xs[1:]))
        assert all(x1 - x0 <= K and y1 - y0 <= 3 * K for x0, x1, y0, y1 in cov.rects)


def test_rectangle_cover_few_small_rectangles_on_square_diagrams():
    for c in range(1, 40):
        for K in range(1, 8):
            cov = rectangle_cover(c, c, K)
            small = sum(1 for x0, x1, y0, y1 in cov.rects if (x1 - x0, y1 - y0) != (K, 3 * K))
            assert small <= 3


def test_examples():
    P = [0, 3, 1, 5]
    assert fast_decide_1d(P, P, 1.0, 0.1).verdict
    assert not fast_decide_1d([0, 4, 0], [0, 0], 1.0, 1.0).verdict
    assert fast_decide_1d([0, 4, 0], [0, 0], 1.0, 5.0).verdict
    with pytest.raises(ValueError):
        fast_decide_1d([0, 1], [0, 1], 5.0, 1.0)
    with pytest.raises(ValueError):
        fast_decide_1d([(0, 0), (1, 1)], [(0, 0), (1, 1)], 1.0, 1.0)


def test_confinement_on_simplified_pairs():
    rng = np.random.default_rng(0)
    for _ in range(60):
        P, Q = random_pair(rng, 40)
        alpha = float(rng.uniform(1, 8))
        delta = exact_frechet(P, Q, 1e-6) * float(rng.uniform(0.5, 1.5)) + 1e-3
        rep = simplify_report(collapse_degenerate_1d(Curve(P)), collapse_degenerate_1d(Curve(Q)), alpha, delta)
        Ph, Qh = collapse_degenerate_1d(rep.P), collapse_degenerate_1d(rep.Q)
        k = max(short_pieces(Ph.values, delta), short_pieces(Qh.values, delta))
        for i, j in reachable_cells(Ph, Qh, delta):
            assert abs(i - j) <= 2 * k + 1


def test_decider_sandwich():
    rng = np.random.default_rng(1)
    for _ in range(80):
        P, Q = random_pair(rng, 48)
        dF = exact_frechet(P, Q, 1e-9)
        for alpha in (1.0, 2.0, 8.0, 12.0):
            alpha = min(alpha, max(len(P), len(Q)))
            for delta in (dF * 0.5, dF * 0.999, dF * 1.001, dF / (3 * alpha) * 0.99):
                out = fast_decide_1d(P, Q, alpha, delta)
                if out.verdict:
                    assert exact_decide(P, Q, 3 * alpha * delta * (1 + 1e-9))
                else:
                    assert not exact_decide(P, Q, delta * (1 - 1e-9))


def test_entrance_work_is_linear():
    rng = np.random.default_rng(2)
    for _ in range(20):
        P, Q = random_pair(rng, 200, nmin=100)
        dF = exact_frechet(P, Q, 1e-6)
        out = fast_decide_1d(P, Q, 8.0, dF)
        assert out.counters["entrance_components"] <= 4 * (len(P) + len(Q))


def test_approx_frechet_1d_examples():
    P = [0, 3, 1, 5]
    assert approx_frechet_1d(P, P, 6.0) == 0.0
    v = approx_frechet_1d([0, 1, 0, 2], [3, 4, 3, 5], 12.0, 1.0)
    assert 3.0 - 1e-9 <= v <= 12.0 * 2.0 * 3.0
    with pytest.raises(ValueError):
        approx_frechet_1d(P, P, 0.5)


def test_approx_frechet_1d_sandwich():
    rng = np.random.default_rng(3)
    for _ in range(30):
        P, Q = random_pair(rng, 40)
        dF = exact_frechet(P, Q, 1e-9)
        for alpha in (2.0, 6.0, 12.0):
            v = approx_frechet_1d(P, Q, alpha, 1.0)
            assert dF - 1e-7 <= v <= alpha * 2.0 * dF + 1e-7
