"""Comparison-based curvature testers on spaces with known verdicts."""

import math

import numpy as np
import pytest

from alexgeo.curvature import (
    ConvexityInstance,
    c2_convexity_check,
    cat_midpoint_test,
    cbb_quadruple_test,
    estimate_lower_bound,
    limit_convexity_check,
)
from alexgeo.gallery import circle_space, flat_grid, icosphere, segment_space, tripod
from alexgeo.gh import ApproxMap
from alexgeo.metric_core import FiniteMetricSpace, metric_sample


def exact_cylinder(n_ang=28, n_z=10, radius=1.0, height=1.0):
    # closed-form flat product metric, no lattice error at all
    th = 2 * math.pi * np.arange(n_ang) / n_ang
    z = np.linspace(0, height, n_z)
    T, Z = np.meshgrid(th, z, indexing="ij")
    t, zz = T.ravel(), Z.ravel()
    dth = np.abs(t[:, None] - t[None, :])
    dth = np.minimum(dth, 2 * math.pi - dth)
    d = np.hypot(radius * dth, zz[:, None] - zz[None, :])
    return FiniteMetricSpace(d)


def test_cbb_flat_grid_verdicts():
    G = flat_grid(15, 1.0)
    ok = cbb_quadruple_test(G, -0.05, n_samples=400, seed=0)
    assert ok.passed and ok.n_tested == 400
    assert ok.max_excess_adjusted < 0
    bad = cbb_quadruple_test(G, 0.1, n_samples=400, seed=0)
    assert not bad.passed
    assert bad.max_excess_adjusted > 5e-3
    assert bad.worst  # witness quadruple recorded
    assert {"quadruple", "excess"} <= set(bad.worst)


def test_cbb_circle_diameter_gate():
    # a round circle has curvature >= 1; above that its diameter is too big
    C = circle_space(90, 1.0)
    ms = 2 * math.pi / 90
    good = cbb_quadruple_test(C, 1.0, n_samples=300, seed=0, mesh_scale=ms)
    assert good.passed and good.diameter_ok
    bad = cbb_quadruple_test(C, 1.3, n_samples=300, seed=0, mesh_scale=ms)
    assert not bad.passed and not bad.diameter_ok


def test_cbb_exact_cylinder_is_nonnegatively_curved():
    X = exact_cylinder()
    rep = cbb_quadruple_test(X, 0.0, n_samples=800, seed=0, mesh_scale=1e-9)
    assert rep.passed


def test_tripod_fails_every_bracketed_k():
    T = tripod(20, 1.0)
    est = estimate_lower_bound(T, n_samples=400, seed=0)
    assert est.k_lower == -math.inf
    assert est.bracket == (-math.inf, -100.0)
    worst = cbb_quadruple_test(T, -100.0, n_samples=400, seed=0)
    assert not worst.passed


def test_estimate_flat_grid_brackets_zero():
    G = flat_grid(15, 1.0)
    est = estimate_lower_bound(G, n_samples=400, seed=0)
    assert -1e-6 <= est.k_lower <= 1e-6
    lo, hi = est.bracket
    # the bracket is consistent with the raw test at the same seed
    assert cbb_quadruple_test(G, lo, n_samples=400, seed=0).passed
    assert not cbb_quadruple_test(G, hi + 1e-9, n_samples=400, seed=0).passed


def test_estimate_is_deterministic():
    G = flat_grid(10, 1.0)
    a = estimate_lower_bound(G, n_samples=200, seed=5)
    b = estimate_lower_bound(G, n_samples=200, seed=5)
    assert a.k_lower == b.k_lower and a.bracket == b.bracket


def test_estimate_top_of_range():
    # a two-point space passes everything; k_lower = top of the range
    X = segment_space(2, 0.5)
    est = estimate_lower_bound(X, n_samples=50, seed=0, k_range=(-10.0, 10.0))
    assert est.k_lower == 10.0


def test_cat_midpoint_grid_vs_circle():
    G = flat_grid(15, 1.0)
    ok = cat_midpoint_test(G, 0.0, n_samples=200, seed=0, mesh_scale=1 / 14)
    assert ok.passed
    C = circle_space(90, 1.0)
    bad = cat_midpoint_test(C, 0.0, n_samples=200, seed=0, mesh_scale=2 * math.pi / 90)
    assert not bad.passed
    assert bad.max_violation > 1.0
    assert bad.worst


def test_cat_midpoint_sphere_sample():
    m = icosphere(h=0.15)
    X, _ = metric_sample(m, 300, seed=0)
    assert not cat_midpoint_test(X, 0.0, n_samples=200, seed=0, mesh_scale=0.15).passed
    assert cat_midpoint_test(X, 1.2, n_samples=200, seed=0, mesh_scale=0.15).passed


def circle_in_plane(n=240):
    ang = 2 * math.pi * np.arange(n) / n
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    return FiniteMetricSpace.from_points(pts), circle_space(n, 1.0)


def test_c2_convexity_circle():
    amb, intr = circle_in_plane()
    z = np.arange(amb.n)
    good = c2_convexity_check(amb, intr, z, 1.15 / 24, rho=0.5)
    assert good.passed and good.n_eligible > 0
    bad = c2_convexity_check(amb, intr, z, 1.0 / 24, rho=0.5)
    assert not bad.passed
    assert bad.worst_violation > 1e-3
    assert bad.worst_pair is not None


def test_limit_convexity_chain():
    # identical instances converge to themselves; the chain slack absorbs
    # the (here zero) approximation error
    amb, intr = circle_in_plane(120)
    z = np.arange(amb.n)
    ident = ApproxMap(amb, amb, np.arange(amb.n))
    inst = ConvexityInstance(X=amb, d_Z=intr, z_indices=z, to_limit=ident, rho=0.5)
    rep = limit_convexity_check([inst, inst], amb, intr, z, C=1.15 / 24)
    assert rep.passed
    assert rep.rho == pytest.approx(0.25)
    with pytest.raises(ValueError, match="radius"):
        limit_convexity_check([inst], amb, intr, z, C=1.15 / 24, rho_limit=0.4)
    weak = ConvexityInstance(X=amb, d_Z=intr, z_indices=z, to_limit=ident, rho=0.5)
    with pytest.raises(ValueError, match="certificate"):
        limit_convexity_check([weak], amb, intr, z, C=0.0)


def test_cbb_monotone_in_k():
    # pass set is down-closed in k for a fixed quadruple sample
    G = flat_grid(12, 1.0)
    ks = [-5.0, -1.0, -0.1, 0.05, 0.5]
    verdicts = [cbb_quadruple_test(G, k, n_samples=300, seed=2).passed for k in ks]
    flipped = verdicts.index(False) if False in verdicts else len(ks)
    assert all(verdicts[:flipped]) and not any(verdicts[flipped:])
