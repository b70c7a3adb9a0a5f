"""Warp profiles and collar extensions."""

import math

import numpy as np
import pytest

from alexgeo.collar import (
    BoundResult,
    CollarExtension,
    adaptive_profile,
    build_extension,
    projection,
    radial_bound,
    tangential_bound,
    warp_profile,
)
from alexgeo.gallery import flat_disc
from alexgeo.gh import measured_lipschitz, verify_approx
from alexgeo.metric_core import intrinsic_metric


def test_profile_endpoint_values():
    p = warp_profile(-1.5, 0.3, 0.8)
    assert p.phi(0.0) == pytest.approx(1.0, abs=1e-12)
    assert p.dphi(0.0) == pytest.approx(-1.5, rel=1e-9)
    assert abs(p.phi(p.t0) - 0.3) <= 1e-9
    assert p.dphi(p.t0) == 0.0
    assert p.d2phi(p.t0) == 0.0
    # flat beyond the junction would be an extension; inside it is monotone
    ts = np.linspace(0.0, p.t0, 2000)
    vals = p.phi(ts)
    assert np.all(np.diff(vals) <= 1e-12)


def test_profile_random_batch():
    rng = np.random.default_rng(7)
    for _ in range(200):
        lam = -float(rng.uniform(0.01, 5.0))
        eps = float(rng.uniform(0.05, 0.95))
        t0 = float(rng.uniform(0.1, 5.0))
        p = warp_profile(lam, eps, t0)
        assert p.phi(0.0) == 1.0
        assert abs(p.phi(t0) - eps) <= 1e-9
        assert p.dphi(t0) == 0.0
        grid = np.linspace(0.0, t0, 500)
        assert np.all(np.diff(p.phi(grid)) <= 1e-10)


def test_profile_derivatives_match_finite_differences():
    p = warp_profile(-2.0, 0.4, 1.1)
    hs = 1e-6
    for t in np.linspace(0.05, p.t0 - 0.05, 9):
        num1 = (p.phi(t + hs) - p.phi(t - hs)) / (2 * hs)
        num2 = (p.phi(t + hs) - 2 * p.phi(t) + p.phi(t - hs)) / hs ** 2
        assert p.dphi(t) == pytest.approx(num1, rel=1e-5, abs=1e-7)
        assert p.d2phi(t) == pytest.approx(num2, rel=1e-3, abs=1e-3)


def test_zero_slope_profile_is_constant():
    p = warp_profile(0.0, 0.5, 1.0)
    ts = np.linspace(0, 1, 50)
    assert np.allclose(p.phi(ts), 1.0)
    assert np.allclose(p.dphi(ts), 0.0)


def test_profile_validation():
    with pytest.raises(ValueError):
        warp_profile(0.5, 0.5, 1.0)
    with pytest.raises(ValueError):
        warp_profile(-1.0, 1.5, 1.0)
    with pytest.raises(ValueError):
        warp_profile(-1.0, 0.5, 0.0)


def test_adaptive_schedule():
    for i in (2, 4, 10, 100):
        p = adaptive_profile(i)
        assert p.t0 == pytest.approx(10.0 / math.sqrt(i))
        assert p.eps == pytest.approx(1.0 - i ** -1.5)
        assert p.lambda_bar == pytest.approx(-1.0 / i)
        assert p.ratio == pytest.approx(10.0)
        assert not p.eps_clamped
    clamped = adaptive_profile(1)
    assert clamped.eps_clamped and clamped.eps == 0.01
    with pytest.raises(ValueError):
        adaptive_profile(0)


def grid_min_radial(p, n=4000):
    ts = np.linspace(0.0, p.t0 * (1 - 1e-9), n)
    return float(np.min(-p.d2phi(ts) / p.phi(ts)))


def grid_min_tangential(p, k_lower, n=4000):
    ts = np.linspace(0.0, p.t0 * (1 - 1e-9), n)
    phi = p.phi(ts)
    return float(np.min((k_lower - p.dphi(ts) ** 2) / phi ** 2))


def test_bounds_dominate_grid_minimum():
    for i in (4, 9, 16, 25):
        p = adaptive_profile(i)
        rad = radial_bound(p)
        tan = tangential_bound(p, 0.0)
        assert rad.value <= grid_min_radial(p) + 1e-9
        assert tan.value <= grid_min_tangential(p, 0.0) + 1e-9
        # shape ratio 10 clears both certificate thresholds
        assert rad.certified and tan.certified


def test_bounds_uncertified_below_threshold():
    p = warp_profile(-1.0, 0.5, 0.3)  # ratio 0.6
    assert not radial_bound(p).certified
    assert not tangential_bound(p, 0.0).certified
    # uncertified values still sit below the grid minimum
    assert radial_bound(p).value <= grid_min_radial(p) + 1e-9


def test_tangential_bound_tends_to_boundary_curvature():
    vals = [tangential_bound(adaptive_profile(i), 0.0).value for i in (4, 16, 64, 256)]
    assert all(v < 0 for v in vals)
    assert vals == sorted(vals)  # monotone up toward 0
    assert abs(vals[-1]) < 1e-3


def test_build_extension_geometry():
    m = flat_disc(1.0, h=0.12)
    prof = warp_profile(-2.5, 0.5, 0.2)
    ext = build_extension(m, prof, layers=6)
    assert isinstance(ext, CollarExtension)
    g = ext.glued
    nb = int(m.boundary_mask.sum())
    assert g.n == m.n + 6 * nb
    assert ext.t_grid[0] == 0.0 and ext.t_grid[-1] == pytest.approx(0.2)

    gm = intrinsic_metric(g)
    base = np.arange(ext.base_n)
    # every outermost collar point sits exactly t0 from the base
    d_ob = gm.dist[np.ix_(ext.outer, base)].min(axis=1)
    assert np.allclose(d_ob, 0.2, atol=1e-9)

    # the collar may shorten base pairs, but never below the warp floor
    db = intrinsic_metric(m).dist
    dg = gm.dist[np.ix_(base, base)]
    mask = db > 1e-12
    ratio = dg[mask] / db[mask]
    assert ratio.max() <= 1.0 + 1e-9
    assert ratio.min() >= prof.eps - 1e-9

    # outer rim shrinks by exactly the warp floor
    rim = np.flatnonzero(m.boundary_mask)
    ang = np.arctan2(m.points[rim, 1], m.points[rim, 0])
    order = np.argsort(ang)
    rim_o, out_o = rim[order], np.asarray(ext.outer)[order]
    circ_base = sum(db[a, b] for a, b in zip(rim_o, np.roll(rim_o, -1)))
    circ_out = sum(gm.dist[a, b] for a, b in zip(out_o, np.roll(out_o, -1)))
    assert circ_out == pytest.approx(prof.eps * circ_base, rel=1e-9)

    assert gm.diameter <= intrinsic_metric(m).diameter + 2 * prof.t0 + 1e-9


def test_projection_quality_small_disc():
    m = flat_disc(1.0, h=0.12)
    prof = warp_profile(-2.5, 0.5, 0.2)
    ext = build_extension(m, prof, layers=6)
    f = projection(ext)
    h = 0.12
    lip = measured_lipschitz(f, 10000, seed=0)
    assert lip <= 1.0 / prof.eps + 5 * h + 1e-9
    dist_bound = max(2 * prof.t0, (1 / prof.eps - 1) * (2.0 + 2 * prof.t0)) + 5 * h
    assert verify_approx(f) <= dist_bound


def test_layer_grid_rejects_coarse_layers():
    prof = warp_profile(-2.5, 0.5, 0.2)
    m = flat_disc(1.0, h=0.2)
    with pytest.raises(ValueError):
        build_extension(m, prof, layers=1)
