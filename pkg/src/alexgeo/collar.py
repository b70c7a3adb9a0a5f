"""Warped-product boundary collars.

A collar glues boundary x [0, t0] to a sample along its boundary, scaling
boundary lengths by an explicit warping function phi that starts at 1 with
slope lambda_bar <= 0 and flattens out at the value eps in finite distance
t0. The radial and tangential curvature quantities of the collar metric
dt^2 + phi(t)^2 g_boundary are bounded below in closed form when the shape
ratio |lambda_bar| t0 / (1 - eps) is large enough; otherwise a flagged
numerical fallback bound is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .metric_core import SampledManifold

__all__ = [
    "WarpProfile",
    "BoundResult",
    "CollarExtension",
    "warp_profile",
    "adaptive_profile",
    "radial_bound",
    "tangential_bound",
    "build_extension",
    "projection",
]

# shape ratio above which the radial closed-form bound is certified
RADIAL_RATIO = 6.0 / (3.0 - math.sqrt(3.0))  # = 4.7320508...
TANGENTIAL_RATIO = 2.0
GRID_N = 20001


@dataclass
class WarpProfile:
    """phi(t) = (1-eps) exp[A (1/(t0-t) - 1/t0)] + eps with A = lb t0^2/(1-eps).

    phi(0) = 1, phi'(0) = lambda_bar, phi(t0) = eps and phi'(t0) = 0, with
    all derivatives taken analytically (the flat junction at t0 is exact:
    the exponential vanishes to all orders). lambda_bar = 0 gives phi == 1.
    """

    lambda_bar: float
    eps: float
    t0: float
    eps_clamped: bool = False

    def __post_init__(self) -> None:
        if self.lambda_bar > 0:
            raise ValueError("lambda_bar must be <= 0")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")
        self._A = self.lambda_bar * self.t0 ** 2 / (1.0 - self.eps)

    @property
    def ratio(self) -> float:
        return abs(self.lambda_bar) * self.t0 / (1.0 - self.eps)

    def _exp_g(self, t: np.ndarray) -> np.ndarray:
        u = self.t0 - t
        out = np.zeros_like(u)
        pos = u > 0
        with np.errstate(over="ignore"):
            out[pos] = np.exp(self._A * (1.0 / u[pos] - 1.0 / self.t0))
        return out

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if self._A == 0.0:
            v = np.ones_like(t)
        else:
            v = (1.0 - self.eps) * self._exp_g(t) + self.eps
            v[t >= self.t0] = self.eps
        return float(v[0]) if scalar else v

    def dphi(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        u = self.t0 - t
        v = np.zeros_like(u)
        pos = u > 0
        v[pos] = (1.0 - self.eps) * self._exp_g(t)[pos] * self._A / u[pos] ** 2
        return float(v[0]) if scalar else v

    def d2phi(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        u = self.t0 - t
        v = np.zeros_like(u)
        pos = u > 0
        up = u[pos]
        # phi'' = (1-eps) e^g (g'^2 + g'') with g' = A/u^2, g'' = 2A/u^3
        v[pos] = (1.0 - self.eps) * self._exp_g(t)[pos] * (
            (self._A / up ** 2) ** 2 + 2.0 * self._A / up ** 3
        )
        return float(v[0]) if scalar else v


def warp_profile(lambda_bar: float, eps: float, t0: float) -> WarpProfile:
    """Construct the collar warping function for the given boundary slope
    bound lambda_bar <= 0, floor value eps in (0, 1) and collar depth t0."""
    return WarpProfile(lambda_bar, eps, t0)


def adaptive_profile(i: int, lambda_minus: float | None = None) -> WarpProfile:
    """Parameter schedule t0 = 10/sqrt(i), eps = 1 - i^{-3/2},
    lambda_bar = min(0, lambda_minus) with default -1/i; the shape ratio is
    then exactly 10 for every i >= 2. i = 1 would give eps = 0; eps is
    clamped to 0.01 and the profile flagged."""
    if i < 1:
        raise ValueError("index i must be >= 1")
    t0 = 10.0 / math.sqrt(i)
    eps_raw = 1.0 - i ** -1.5
    lam = min(0.0, -1.0 / i if lambda_minus is None else lambda_minus)
    clamped = eps_raw < 0.01
    return WarpProfile(lam, max(eps_raw, 0.01), t0, eps_clamped=clamped)


@dataclass
class BoundResult:
    value: float
    certified: bool
    method: str


def _grid(p: WarpProfile) -> np.ndarray:
    return np.linspace(0.0, p.t0, GRID_N)


def radial_bound(p: WarpProfile) -> BoundResult:
    """Certified lower bound for inf_t -phi''(t)/phi(t) over the collar.

    Closed form -(1/eps) max(0, 2 lb/t0 + lb^2/(1-eps)) when the shape ratio
    exceeds 6/(3 - sqrt(3)); otherwise the infimum over a dense grid is
    returned and flagged as numerical.
    """
    if p.lambda_bar == 0.0:
        return BoundResult(0.0, True, "closed-form")
    if p.ratio > RADIAL_RATIO:
        v = -(1.0 / p.eps) * max(
            0.0, 2.0 * p.lambda_bar / p.t0 + p.lambda_bar ** 2 / (1.0 - p.eps)
        )
        return BoundResult(v, True, "closed-form")
    t = _grid(p)
    vals = -p.d2phi(t) / p.phi(t)
    v = float(vals.min())
    return BoundResult(v - 1e-9 * max(1.0, abs(v)), False, "grid")


def tangential_bound(p: WarpProfile, K_boundary_lower: float) -> BoundResult:
    """Certified lower bound for inf_t (K_boundary_lower - phi'(t)^2)/phi(t)^2.

    Closed form (1/eps^2)(min(K, 0) - lb^2) when the shape ratio exceeds 2
    (then |phi'| <= |lambda_bar| everywhere); otherwise a flagged grid
    infimum.
    """
    K = K_boundary_lower
    if p.lambda_bar == 0.0:
        # phi == 1: the expression is constantly K
        return BoundResult(K, True, "closed-form")
    if p.ratio > TANGENTIAL_RATIO:
        v = (min(K, 0.0) - p.lambda_bar ** 2) / p.eps ** 2
        return BoundResult(v, True, "closed-form")
    t = _grid(p)
    vals = (K - p.dphi(t) ** 2) / p.phi(t) ** 2
    v = float(vals.min())
    return BoundResult(v - 1e-9 * max(1.0, abs(v)), False, "grid")


@dataclass
class CollarExtension:
    """Result of gluing a collar onto a sample along its boundary."""

    glued: SampledManifold
    base: SampledManifold
    profile: WarpProfile
    t_grid: np.ndarray
    base_n: int
    seam: np.ndarray            # boundary vertex ids of the base (t = 0 ring)
    outer: np.ndarray           # vertex ids of the new outer boundary ring
    collar_base: np.ndarray     # for each glued vertex: footpoint vertex id in base
    collar_t: np.ndarray        # for each glued vertex: collar coordinate t
    meta: dict = field(default_factory=dict)


def _layer_grid(p: WarpProfile, layers: int) -> np.ndarray:
    """Layer interfaces with equal phi-decrements (uniform when phi == 1)."""
    if layers < 2:
        raise ValueError("need at least 2 collar layers")
    if p.lambda_bar == 0.0:
        return np.linspace(0.0, p.t0, layers + 1)
    drop = (1.0 - p.eps) / layers
    if drop > 0.25 * p.eps + 1e-15:
        raise ValueError(
            f"phi variation per layer exceeds 20%: need at least "
            f"{math.ceil(4.0 * (1.0 - p.eps) / p.eps)} layers for eps={p.eps:.4g}"
        )
    ts = [0.0]
    for j in range(1, layers):
        target = 1.0 - j * drop
        ts.append(brentq(lambda t: p.phi(t) - target, ts[-1], p.t0, xtol=1e-14))
    ts.append(p.t0)
    return np.asarray(ts)


def build_extension(m: SampledManifold, p: WarpProfile, layers: int = 8) -> CollarExtension:
    """Glue boundary x [0, t0] with metric dt^2 + phi(t)^2 (boundary metric).

    The seam shares the base boundary vertices (no duplicates); each further
    layer copies the boundary subgraph with ring edges scaled by phi, radial
    edges of length dt and both diagonals (hypot(dt, phi_mid * L)). The new
    outer ring at t0 is the boundary of the glued sample.
    """
    bi = m.boundary_indices
    if len(bi) == 0:
        raise ValueError("cannot extend a sample without boundary")
    ts = _layer_grid(p, layers)
    phis = p.phi(ts)

    bmap = -np.ones(m.n, dtype=int)
    bmap[bi] = np.arange(len(bi))
    mask_b = m.boundary_mask
    be_sel = mask_b[m.edges[:, 0]] & mask_b[m.edges[:, 1]]
    ring_edges = m.edges[be_sel]
    ring_len = m.edge_lengths[be_sel]

    nb = len(bi)
    n_base = m.n
    # collar vertex ids: layer j>=1, boundary slot r -> n_base + (j-1)*nb + r
    def vid(j: int, r: np.ndarray) -> np.ndarray:
        return np.where(j == 0, bi[r], n_base + (j - 1) * nb + r)

    edges = [m.edges]
    lengths = [m.edge_lengths]
    rb0, rb1 = bmap[ring_edges[:, 0]], bmap[ring_edges[:, 1]]
    allslots = np.arange(nb)
    for j in range(1, layers + 1):
        # ring edges at layer j
        edges.append(np.stack([vid(j, rb0), vid(j, rb1)], axis=1))
        lengths.append(phis[j] * ring_len)
    for j in range(layers):
        dt = ts[j + 1] - ts[j]
        # radial edges
        edges.append(np.stack([vid(j, allslots), vid(j + 1, allslots)], axis=1))
        lengths.append(np.full(nb, dt))
        # diagonals both ways
        phimid = 0.5 * (phis[j] + phis[j + 1])
        diag = np.hypot(dt, phimid * ring_len)
        edges.append(np.stack([vid(j, rb0), vid(j + 1, rb1)], axis=1))
        lengths.append(diag)
        edges.append(np.stack([vid(j, rb1), vid(j + 1, rb0)], axis=1))
        lengths.append(diag)

    n_total = n_base + layers * nb
    boundary = np.zeros(n_total, dtype=bool)
    outer = n_base + (layers - 1) * nb + np.arange(nb)
    boundary[outer] = True

    pts = None
    if m.points is not None and m.points.shape[1] <= 4:
        extra = np.zeros((n_total, m.points.shape[1] + 1))
        extra[:n_base, :-1] = m.points
        for j in range(1, layers + 1):
            rows = n_base + (j - 1) * nb + allslots
            extra[rows, :-1] = m.points[bi]
            extra[rows, -1] = ts[j]
        pts = extra

    collar_base = np.concatenate(
        [np.arange(n_base)] + [bi for _ in range(layers)]
    )
    collar_t = np.concatenate(
        [np.zeros(n_base)] + [np.full(nb, ts[j]) for j in range(1, layers + 1)]
    )

    glued = SampledManifold(
        points=pts,
        edges=np.concatenate(edges),
        edge_lengths=np.concatenate(lengths),
        boundary_mask=boundary,
        embedding_faithful=False,
        meta={
            "collar": {
                "lambda_bar": p.lambda_bar,
                "eps": p.eps,
                "t0": p.t0,
                "layers": layers,
            }
        },
    )
    return CollarExtension(
        glued=glued,
        base=m,
        profile=p,
        t_grid=ts,
        base_n=n_base,
        seam=bi.copy(),
        outer=outer,
        collar_base=collar_base,
        collar_t=collar_t,
    )


def projection(
    e: CollarExtension,
    glued_metric=None,
    base_metric=None,
):
    """Footpoint retraction of the glued sample onto the base as an
    ApproxMap: identity on the base, collar vertex (u, t) -> u.

    Intrinsic metrics are computed on demand (subject to the all-pairs cap);
    pass precomputed FiniteMetricSpace objects to reuse them. Measured
    distortion is bounded by max(2 t0, (1/eps - 1)(diam + 2 t0)) and the
    measured Lipschitz ratio by 1/eps, both up to mesh slack.
    """
    from .gh import ApproxMap
    from .metric_core import intrinsic_metric

    if glued_metric is None:
        glued_metric = intrinsic_metric(e.glued)
    if base_metric is None:
        base_metric = intrinsic_metric(e.base)
    return ApproxMap(glued_metric, base_metric, e.collar_base.copy())
