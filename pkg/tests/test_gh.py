"""Approximation maps, GH bounds and composite-space constructions."""

import math

import numpy as np
import pytest

from alexgeo.gallery import circle_space, flat_grid, segment_space
from alexgeo.gh import (
    ApproxMap,
    exhaustive_search,
    gh_bounds,
    glue,
    glued_space,
    gluing_limit_check,
    measured_lipschitz,
    quotient_metric,
    search_approx,
    verify_approx,
    warped_limit_map,
    warped_product,
)
from alexgeo.metric_core import FiniteMetricSpace


def all_pairs_space(n, d):
    m = np.full((n, n), float(d))
    np.fill_diagonal(m, 0.0)
    return FiniteMetricSpace(m)


def test_approx_map_measures_quality():
    X = segment_space(3, 1.0)
    Y = segment_space(2, 1.0)
    f = ApproxMap(X, Y, [0, 0, 1])
    assert f.distortion == 0.5
    assert f.net_radius == 0.0
    assert f.eps == 0.5
    assert verify_approx(f) == 0.5


def test_approx_map_validation():
    X = segment_space(3, 1.0)
    Y = segment_space(2, 1.0)
    with pytest.raises(ValueError, match="every source point"):
        ApproxMap(X, Y, [0, 1])
    with pytest.raises(ValueError, match="target range"):
        ApproxMap(X, Y, [0, 1, 2])


def test_exhaustive_equilateral_rescale():
    X = all_pairs_space(3, 1.0)
    Y = all_pairs_space(3, 1.3)
    f = exhaustive_search(X, Y)
    assert f.eps == pytest.approx(0.3, abs=1e-15)
    assert len(np.unique(f.assignment)) == 3  # injective is optimal here
    with pytest.raises(ValueError, match="capped"):
        exhaustive_search(all_pairs_space(9, 1.0), Y)


def test_search_segment_downsample():
    X = segment_space(60, 1.0)
    Y = segment_space(25, 1.0)
    f = search_approx(X, Y)
    assert f.eps <= 0.05  # about one target spacing
    g = search_approx(X, Y)
    assert np.array_equal(f.assignment, g.assignment)
    assert f.eps == g.eps


def test_gh_bounds_circle_vs_segment():
    C = circle_space(40, 1.0)
    S = segment_space(41, 2.0)
    b = gh_bounds(C, S)
    assert b.lower == pytest.approx((math.pi - 2.0) / 2.0, abs=1e-12)
    assert b.upper >= b.lower
    assert b.upper == 3.0 * b.eps
    assert b.map is not None


def test_gh_bounds_identity_map():
    X = flat_grid(5, 1.0)
    f = ApproxMap(X, X, np.arange(X.n))
    b = gh_bounds(X, X, f=f)
    assert b.lower == 0.0 and b.upper == 0.0 and b.eps == 0.0


def test_quotient_figure_eight():
    # collapsing two antipodal circle points leaves a wedge of two loops
    C = circle_space(12, 1.0)
    Q, imap, a_star = quotient_metric(C, [0, 6])
    assert Q.n == C.n - 1
    assert imap[0] == -1 and imap[6] == -1
    step = 2.0 * math.pi / 12
    # short way through the wedge point beats the old arc
    assert Q.dist[imap[1], imap[7]] == pytest.approx(2 * step, abs=1e-12)
    # opposite points of the two loops stay at half a circumference each
    assert Q.dist[imap[3], imap[9]] == pytest.approx(6 * step, abs=1e-12)
    assert Q.dist[imap[3], a_star] == pytest.approx(3 * step, abs=1e-12)
    with pytest.raises(ValueError, match="nonempty"):
        quotient_metric(C, [])


def test_glued_segments():
    X = segment_space(11, 1.0)
    Y = segment_space(11, 1.0)
    Z, x_ids, y_ids = glued_space(X, Y, [10], [0])
    assert Z.n == 21
    assert y_ids[0] == x_ids[10]  # seam identified
    assert Z.dist[x_ids[0], y_ids[10]] == pytest.approx(2.0, abs=1e-12)
    assert Z.dist[x_ids[3], y_ids[4]] == pytest.approx(0.7 + 0.4, abs=1e-12)
    with pytest.raises(ValueError, match="seam"):
        glued_space(X, Y, [], [])


def test_glued_seam_shortcut():
    # a two-point seam lets paths switch factors at either end
    X = segment_space(11, 1.0)
    Y = circle_space(20, 1.0)
    half = 10 * (2 * math.pi / 20)
    Z, x_ids, y_ids = glued_space(X, Y, [0, 10], [0, 10])
    # the segment shortcuts the circle between the glued antipodes
    assert Z.dist[y_ids[0], y_ids[10]] == pytest.approx(1.0, abs=1e-12)
    q = 5 * (2 * math.pi / 20)
    assert Z.dist[y_ids[5], y_ids[15]] == pytest.approx(min(half, 2 * q, q + 1.0 + q), abs=1e-12)


def test_gluing_limit_check_fields():
    X = segment_space(5, 0.2)
    Y = segment_space(30, 1.0)
    g = glue(X, Y, [0], [0])
    f = ApproxMap(Y, Y, np.arange(Y.n))
    rep = gluing_limit_check(g, f, [0])
    assert rep.passed
    assert rep.eps_f == 0.0
    assert rep.drift == 0.0
    assert rep.diam_x == pytest.approx(0.2)
    assert rep.measured_eps <= rep.bound
    assert rep.measured_eps == pytest.approx(0.2, abs=1e-12)


def test_warped_product_trivial_warp_is_l2():
    X = segment_space(6, 1.0)
    Y = segment_space(5, 0.5)
    W, pairs = warped_product(X, Y, np.ones(Y.n))
    assert W.n == 30
    ref = np.hypot(
        X.dist[pairs[:, 0]][:, pairs[:, 0]], Y.dist[pairs[:, 1]][:, pairs[:, 1]]
    )
    assert np.abs(W.dist - ref).max() <= 1e-12
    with pytest.raises(ValueError, match="positive"):
        warped_product(X, Y, np.zeros(Y.n))
    with pytest.raises(ValueError, match="capped"):
        warped_product(X, Y, np.ones(Y.n), cap=10)


def test_warped_limit_map_bound():
    f = search_approx(segment_space(30, 1.0), segment_space(15, 1.0))
    Y = segment_space(5, 0.5)
    phi = 1.0 + 0.5 * np.sin(np.linspace(0.0, 2.0, Y.n))
    F, bound = warped_limit_map(f, Y, phi)
    assert bound == pytest.approx(float(phi.max()) * f.eps, abs=1e-12)
    assert F.eps <= bound + 1e-12
    assert F.source.n == 30 * 5 and F.target.n == 15 * 5


def test_measured_lipschitz_identity_and_contraction():
    X = segment_space(20, 1.0)
    ident = ApproxMap(X, X, np.arange(X.n))
    assert measured_lipschitz(ident, n_pairs=500, seed=1) == pytest.approx(1.0)
    half = ApproxMap(X, segment_space(20, 0.5), np.arange(X.n))
    assert measured_lipschitz(half, n_pairs=500, seed=1) == pytest.approx(0.5)
