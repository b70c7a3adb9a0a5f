"""Reference example spaces with closed-form ground truth.

Eight generator families cover the gallery: a thin slab between two
Gaussian graphs, flat thin tori and cylinders, a truncated capsule surface
crossed with a circle, solid tube neighborhoods of a segment or circle,
flattening solid ellipsoids, and a plane or sphere with a ball removed.
Small exact helpers (circle, segment, tripod, flat grid, icosphere,
flat disc) feed unit tests and calibration. ground_truth returns the
quantities the families admit in closed form and omits the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .metric_core import FiniteMetricSpace, SampledManifold, neighbor_graph

__all__ = [
    "FAMILIES",
    "ExampleSpec",
    "generate",
    "ground_truth",
    "gaussian_slab",
    "gaussian_graph",
    "thin_torus",
    "thin_cylinder",
    "capsule_factor",
    "capsule_cross_circle",
    "product_with_circle",
    "tube_neighborhood",
    "flattened_disc",
    "plane_minus_ball",
    "sphere_minus_ball",
    "wrapping_half_length",
    "icosphere",
    "flat_disc",
    "flat_grid",
    "tripod",
    "circle_space",
    "segment_space",
]

FAMILIES = (
    "gaussian_slab",
    "thin_torus",
    "capsule_cross_circle",
    "tube_neighborhood",
    "flattened_disc",
    "plane_minus_ball",
    "sphere_minus_ball",
    "thin_cylinder",
)


@dataclass
class ExampleSpec:
    """A gallery request: family name, sequence index i, geometry params and
    target sampling step h (None picks the family default)."""

    family: str
    i: int = 1
    h: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.i < 1:
            raise ValueError("sequence index must be >= 1")
        if self.h is not None and not self.h > 0:
            raise ValueError("mesh step h must be positive")


# ---------------------------------------------------------------- mesh utils


def _grid_edges(ids: np.ndarray, wrap_u: bool = False, wrap_v: bool = False) -> np.ndarray:
    """Quad grid connectivity with both diagonals over an index array."""
    nu, nv = ids.shape
    chunks = []
    for du, dv in ((1, 0), (0, 1), (1, 1), (1, -1)):
        b = np.roll(np.roll(ids, -du, axis=0), -dv, axis=1)
        mask = np.ones((nu, nv), dtype=bool)
        if du and not wrap_u:
            mask[nu - du:, :] = False
        if dv and not wrap_v:
            if dv > 0:
                mask[:, nv - dv:] = False
            else:
                mask[:, :-dv] = False
        chunks.append(np.stack([ids[mask], b[mask]], axis=1))
    return np.concatenate(chunks, axis=0)


def _assemble(
    points: np.ndarray,
    edges: np.ndarray,
    boundary: np.ndarray,
    h: float,
    meta: dict | None = None,
    faithful: bool = True,
) -> SampledManifold:
    """Dedupe edge pairs, measure ambient lengths and wrap up a manifold."""
    p = np.asarray(points, dtype=float)
    e = np.asarray(edges, dtype=np.int64)
    e = e[e[:, 0] != e[:, 1]]
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    e = np.unique(np.stack([lo, hi], axis=1), axis=0)
    w = np.linalg.norm(p[e[:, 0]] - p[e[:, 1]], axis=1)
    keep = w > 0
    return SampledManifold(
        points=p,
        edges=e[keep],
        edge_lengths=w[keep],
        boundary_mask=np.asarray(boundary, dtype=bool),
        embedding_faithful=faithful,
        meta={"h": h, **(meta or {})},
    )


def _hex_disc(radius: float, g: float) -> tuple[np.ndarray, np.ndarray]:
    """Hexagonal lattice filling a disc; returns (points, rim_mask)."""
    dy = g * math.sqrt(3) / 2
    ny = int(math.floor(radius / dy))
    pts = []
    for k in range(-ny, ny + 1):
        y = k * dy
        off = (abs(k) % 2) * g / 2
        half = math.sqrt(max(0.0, radius * radius - y * y))
        nx = int(math.floor((half - off) / g))
        xs = off + g * np.arange(-nx, nx + 1)
        pts.append(np.stack([xs, np.full_like(xs, y)], axis=1))
    p = np.concatenate(pts, axis=0)
    rim = np.linalg.norm(p, axis=1) > radius - 1.15 * g
    return p, rim


def _layered_edges(
    base_edges: np.ndarray, n_base: int, layers: int
) -> np.ndarray:
    """Replicate a base graph across layers with verticals and cross ties."""
    chunks = []
    for t in range(layers):
        chunks.append(base_edges + t * n_base)
    col = np.arange(n_base)
    for t in range(layers - 1):
        a, b = t * n_base, (t + 1) * n_base
        chunks.append(np.stack([col + a, col + b], axis=1))
        chunks.append(base_edges + np.array([a, b]))
        chunks.append(base_edges + np.array([b, a]))
    return np.concatenate(chunks, axis=0)


# ------------------------------------------------------------ exact metrics


def circle_space(n: int = 180, radius: float = 1.0) -> FiniteMetricSpace:
    """Exact arc metric on n equispaced circle points."""
    k = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    k = np.minimum(k, n - k)
    return FiniteMetricSpace(radius * 2 * math.pi * k / n)


def segment_space(n: int = 101, length: float = 1.0) -> FiniteMetricSpace:
    """Exact metric on n equispaced points of a segment."""
    t = np.linspace(0.0, length, n)
    return FiniteMetricSpace(np.abs(t[:, None] - t[None, :]))


def flat_grid(n: int = 15, side: float = 1.0) -> FiniteMetricSpace:
    """Euclidean (extrinsic) metric on an n x n planar grid."""
    xs = np.linspace(0.0, side, n)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    return FiniteMetricSpace.from_points(np.stack([gx.ravel(), gy.ravel()], axis=1))


def tripod(points_per_leg: int = 20, leg_length: float = 1.0) -> FiniteMetricSpace:
    """Three segments glued at one endpoint (the CBB branching witness)."""
    m = points_per_leg
    t = leg_length * np.arange(1, m + 1) / m
    leg = np.concatenate([[0.0], t, t, t])
    which = np.concatenate([[0], np.full(m, 1), np.full(m, 2), np.full(m, 3)])
    same = which[:, None] == which[None, :]
    d = np.where(
        same | (which[:, None] == 0) | (which[None, :] == 0),
        np.abs(leg[:, None] - leg[None, :]),
        leg[:, None] + leg[None, :],
    )
    return FiniteMetricSpace(d)


# --------------------------------------------------------------- flat disc


def flat_disc(radius: float = 1.0, h: float = 0.05) -> SampledManifold:
    """Polar-grid sample of the flat disc; boundary is the rim circle."""
    m_ang = max(8, int(round(2 * math.pi * radius / h)))
    rings = max(2, int(round(radius / h)))
    theta = 2 * math.pi * np.arange(m_ang) / m_ang
    rr = radius * np.arange(1, rings + 1) / rings
    pts = [np.zeros((1, 2))]
    for r in rr:
        pts.append(np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1))
    p = np.concatenate(pts, axis=0)
    ids = 1 + np.arange(rings * m_ang).reshape(rings, m_ang)
    e = [_grid_edges(ids, wrap_v=True)]
    e.append(np.stack([np.zeros(m_ang, dtype=np.int64), ids[0]], axis=1))
    boundary = np.zeros(len(p), dtype=bool)
    boundary[ids[-1]] = True
    return _assemble(p, np.concatenate(e), boundary, h, {"radius": radius})


# --------------------------------------------------------------- icosphere


def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    g = (1 + math.sqrt(5)) / 2
    v = np.array(
        [
            (-1, g, 0), (1, g, 0), (-1, -g, 0), (1, -g, 0),
            (0, -1, g), (0, 1, g), (0, -1, -g), (0, 1, -g),
            (g, 0, -1), (g, 0, 1), (-g, 0, -1), (-g, 0, 1),
        ],
        dtype=float,
    )
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = np.array(
        [
            (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
        ],
        dtype=np.int64,
    )
    return v, f


def _subdivide(v: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    verts = list(v)
    cache: dict[tuple[int, int], int] = {}

    def mid(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            m = verts[a] + verts[b]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    out = np.empty((4 * len(f), 3), dtype=np.int64)
    for i, (a, b, c) in enumerate(f):
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        out[4 * i: 4 * i + 4] = [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
    return np.array(verts), out


def icosphere(
    h: float = 0.05, radius: float = 1.0, stencil: float = 2.6, k: int = 30
) -> SampledManifold:
    """Subdivided icosahedral sample of S^2(radius).

    Edges come from a wide k-nearest stencil (reach ~ stencil x spacing);
    the wide stencil keeps the graph-metric direction bias well under the
    2 percent oracle tolerance. Chord edge weights undershoot arcs by
    O(h^2) relative, which is negligible beside the stencil bias. No
    boundary: the sample is a closed surface.
    """
    v, f = _icosahedron()
    levels = max(0, math.ceil(math.log2(1.0515 / (h / radius))))
    for _ in range(levels):
        v, f = _subdivide(v, f)
    p = radius * v
    e, _ = neighbor_graph(p, k=k, radius_factor=stencil)
    return _assemble(
        p, e, np.zeros(len(p), dtype=bool), h, {"radius": radius}
    )


def sphere_minus_ball(r: float = 0.8, h: float = 0.07, radius: float = 1.0) -> SampledManifold:
    """S^2(radius) with the open geodesic r-ball around the north pole
    removed; boundary = kept points adjacent to a removed point."""
    if not 0 < r < math.pi * radius:
        raise ValueError("ball radius must lie in (0, pi * radius)")
    s = icosphere(h=h, radius=radius)
    ang = radius * np.arccos(np.clip(s.points[:, 2] / radius, -1, 1))
    kept = ang >= r
    if kept.sum() < 4:
        raise ValueError("ball removes almost the whole sphere at this mesh")
    e = s.edges
    removed_touch = np.zeros(s.n, dtype=bool)
    gone = ~kept
    touch = gone[e[:, 0]] | gone[e[:, 1]]
    removed_touch[e[touch, 0]] = True
    removed_touch[e[touch, 1]] = True
    boundary_full = kept & removed_touch
    new_id = -np.ones(s.n, dtype=np.int64)
    new_id[kept] = np.arange(kept.sum())
    keep_e = kept[e[:, 0]] & kept[e[:, 1]]
    return _assemble(
        s.points[kept],
        new_id[e[keep_e]],
        boundary_full[kept],
        h,
        {"radius": radius, "hole_radius": r},
    )


# ------------------------------------------------- Gaussian slab (Example 1)


def gaussian_graph(domain_radius: float = 2.0, h: float = 0.1) -> SampledManifold:
    """Graph surface z = exp(-(x^2+y^2)) over a disc; boundary is the rim."""
    base, rim = _hex_disc(domain_radius, h)
    z = np.exp(-(base ** 2).sum(axis=1))
    p = np.column_stack([base, z])
    e, _ = neighbor_graph(base, k=8, radius_factor=1.35)
    return _assemble(p, e, rim, h, {"domain_radius": domain_radius})


def gaussian_slab(i: int, domain_radius: float = 2.0, h: float = 0.1) -> SampledManifold:
    """Slab of R^3 between the Gaussian graph and its lift by 1/i.

    Flat interior; boundary = both graphs plus the side rim. Collapses
    vertically onto the graph surface as i grows.
    """
    base, rim = _hex_disc(domain_radius, h)
    nb = len(base)
    z0 = np.exp(-(base ** 2).sum(axis=1))
    thick = 1.0 / i
    layers = max(2, int(round(thick / h)) + 1)
    offs = np.linspace(0.0, thick, layers)
    p = np.concatenate(
        [np.column_stack([base, z0 + t]) for t in offs], axis=0
    )
    be, _ = neighbor_graph(base, k=8, radius_factor=1.35)
    e = _layered_edges(be, nb, layers)
    boundary = np.zeros(nb * layers, dtype=bool)
    boundary[:nb] = True
    boundary[-nb:] = True
    for t in range(layers):
        boundary[t * nb: (t + 1) * nb] |= rim
    return _assemble(
        p, e, boundary, h,
        {"i": i, "thickness": thick, "domain_radius": domain_radius},
    )


# ------------------------------------------- flat products (Examples 2, 2.8)


def thin_cylinder(radius: float, height: float, h: float) -> SampledManifold:
    """Flat cylinder S^1(radius) x [0, height]; boundary = both end circles."""
    n_ang = max(8, int(round(2 * math.pi * radius / h)))
    n_z = max(2, int(round(height / h)) + 1)
    theta = 2 * math.pi * np.arange(n_ang) / n_ang
    zs = np.linspace(0.0, height, n_z)
    p = np.stack(
        [
            np.repeat(radius * np.cos(theta)[None, :], n_z, axis=0).ravel(),
            np.repeat(radius * np.sin(theta)[None, :], n_z, axis=0).ravel(),
            np.repeat(zs[:, None], n_ang, axis=1).ravel(),
        ],
        axis=1,
    )
    ids = np.arange(n_z * n_ang).reshape(n_z, n_ang)
    e = _grid_edges(ids, wrap_v=True)
    boundary = np.zeros(len(p), dtype=bool)
    boundary[ids[0]] = True
    boundary[ids[-1]] = True
    return _assemble(p, e, boundary, h, {"radius": radius, "height": height})


def thin_torus(i: int, h: float | None = None) -> SampledManifold:
    """S^1(1/i) x D^1(1/i): flat product, boundary two circles."""
    if h is None:
        h = 0.35 / i
    m = thin_cylinder(radius=1.0 / i, height=2.0 / i, h=h)
    m.meta.update({"i": i})
    return m


# ---------------------------------------- capsule cross circle (Example 3)


def capsule_factor(
    i: int, eps: float | None = None, h: float | None = None
) -> SampledManifold:
    """Truncated capsule surface: boundary of the eps-ball around the unit
    segment on the x-axis in R^3, cut to z >= -1/i.

    The cylindrical part is a structured grid whose psi = 0 line (the top)
    and psi = +-psi_cut rows (the cut) are exact, so the inradius geodesic
    (a meridian arc of length eps * (pi/2 + asin(1/(i eps)))) is a grid
    polyline. Sphere caps are latitude-ring clouds stitched by k-nearest
    edges.
    """
    if eps is None:
        eps = i ** -0.5
    if h is None:
        h = eps / 20
    if i * eps <= 1:
        raise ValueError("need i * eps > 1 so the cut plane meets the capsule")
    psi_cut = math.pi / 2 + math.asin(1.0 / (i * eps))
    cut_z = -1.0 / i

    pts: list[np.ndarray] = []
    edges: list[np.ndarray] = []

    u_n = max(1, int(round(1.0 / h)))
    xs = np.linspace(0.0, 1.0, u_n + 1)
    v_n = 2 * max(2, int(round(eps * psi_cut / h)))
    psi = np.linspace(-psi_cut, psi_cut, v_n + 1)
    gx, gp = np.meshgrid(xs, psi, indexing="ij")
    cyl = np.stack(
        [gx.ravel(), eps * np.sin(gp).ravel(), eps * np.cos(gp).ravel()], axis=1
    )
    ids = np.arange(cyl.shape[0]).reshape(u_n + 1, v_n + 1)
    pts.append(cyl)
    edges.append(_grid_edges(ids))
    stitch = [ids[0].copy(), ids[-1].copy()]  # end columns meet the caps

    offset = cyl.shape[0]
    w_n = max(2, int(round((math.pi / 2) * eps / h)))
    for side in (0, 1):
        cap_ids: list[np.ndarray] = []
        sign = -1.0 if side == 0 else 1.0
        cx = 0.0 if side == 0 else 1.0
        # pole of the hemisphere (kept: its z is 0)
        pole = np.array([[cx + sign * eps, 0.0, 0.0]])
        pts.append(pole)
        cap_ids.append(np.array([offset]))
        offset += 1
        for w in range(1, w_n):
            chi = (math.pi / 2) * w / w_n
            a = eps * math.sin(chi)
            reach = -cut_z / a  # cos(psi) >= -reach survives
            if reach >= 1.0:
                m_w = max(6, int(round(2 * math.pi * a / h)))
                ang = 2 * math.pi * np.arange(m_w) / m_w
            else:
                half = math.acos(-reach)
                m_w = max(2, int(round(2 * half * a / h)))
                ang = np.linspace(-half, half, m_w + 1)
            ring = np.stack(
                [
                    np.full(len(ang), cx + sign * eps * math.cos(chi)),
                    a * np.sin(ang),
                    a * np.cos(ang),
                ],
                axis=1,
            )
            pts.append(ring)
            cap_ids.append(offset + np.arange(len(ang)))
            offset += len(ang)
        stitch.append(np.concatenate(cap_ids))

    p = np.concatenate(pts, axis=0)
    st = np.concatenate(stitch)
    se, _ = neighbor_graph(p[st], k=12, radius_factor=1.9)
    edges.append(st[se])
    boundary = np.abs(p[:, 2] - cut_z) < 1e-9
    m = _assemble(
        p, np.concatenate(edges), boundary, h,
        {"i": i, "eps": eps, "psi_cut": psi_cut},
    )
    return m


def product_with_circle(
    m: SampledManifold, r: float = 1.0, fiber_n: int = 12
) -> SampledManifold:
    """Metric product of a sampled manifold with S^1(r) (polygon fiber).

    Node (v, j) sits at index v * fiber_n + j. Edges: factor edges at fixed
    fiber, fiber edges at fixed factor point, and both product diagonals.
    Boundary = factor boundary x fiber.
    """
    if m.points is None:
        raise ValueError("product builder needs embedded factor points")
    F = fiber_n
    theta = 2 * math.pi * np.arange(F) / F
    fib = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    arc = 2 * r * math.sin(math.pi / F)
    nf = m.n
    pts = np.concatenate(
        [np.repeat(m.points, F, axis=0), np.tile(fib, (nf, 1))], axis=1
    )
    ea, eb = m.edges[:, 0], m.edges[:, 1]
    lf = m.edge_lengths
    j = np.arange(F)
    fa = (ea[:, None] * F + j[None, :]).ravel()
    fb = (eb[:, None] * F + j[None, :]).ravel()
    jp = (j + 1) % F
    fbp = (eb[:, None] * F + jp[None, :]).ravel()
    fap = (ea[:, None] * F + jp[None, :]).ravel()
    v = np.arange(nf)
    ring_a = (v[:, None] * F + j[None, :]).ravel()
    ring_b = (v[:, None] * F + jp[None, :]).ravel()
    edges = np.concatenate(
        [
            np.stack([fa, fb], axis=1),
            np.stack([ring_a, ring_b], axis=1),
            np.stack([fa, fbp], axis=1),
            np.stack([fap, fb], axis=1),
        ]
    )
    lengths = np.concatenate(
        [
            np.repeat(lf, F),
            np.full(nf * F, arc),
            np.repeat(np.hypot(lf, arc), F),
            np.repeat(np.hypot(lf, arc), F),
        ]
    )
    boundary = np.repeat(m.boundary_mask, F)
    if pts.shape[1] > 5:
        return SampledManifold(
            points=None,
            edges=edges,
            edge_lengths=lengths,
            boundary_mask=boundary,
            meta={**m.meta, "fiber_r": r, "fiber_n": F},
        )
    return SampledManifold(
        points=pts,
        edges=edges,
        edge_lengths=lengths,
        boundary_mask=boundary,
        embedding_faithful=m.embedding_faithful,
        meta={**m.meta, "fiber_r": r, "fiber_n": F},
    )


def capsule_cross_circle(
    i: int,
    eps: float | None = None,
    r: float = 1.0,
    h: float | None = None,
    fiber_n: int = 12,
) -> SampledManifold:
    """Truncated capsule surface crossed with S^1(r).

    h controls the capsule factor; the circle fiber is a coarse polygon
    (distance to the boundary lives entirely in the factor, so the meridian
    inradius value is unaffected by fiber resolution).
    """
    fac = capsule_factor(i, eps=eps, h=h)
    return product_with_circle(fac, r=r, fiber_n=fiber_n)


# ------------------------------------------- solid tubes (Example 4 lattice)


def tube_neighborhood(
    kind: str = "circle",
    eps: float = 0.2,
    R: float = 1.0,
    length: float = 1.0,
    h: float = 0.05,
) -> SampledManifold:
    """Solid eps-neighborhood of a circle (radius R) or segment in R^3,
    sampled on a cubic lattice with the 26-point stencil; boundary is the
    outer lattice shell."""
    if kind not in ("circle", "segment"):
        raise ValueError("kind must be 'circle' or 'segment'")
    g = h
    if kind == "circle":
        lo = np.array([-R - eps, -R - eps, -eps])
        hi = np.array([R + eps, R + eps, eps])
    else:
        lo = np.array([-eps, -eps, -eps])
        hi = np.array([length + eps, eps, eps])
    counts = np.floor((hi - lo) / g).astype(int) + 2
    axes = [lo[d] + g * np.arange(counts[d]) for d in range(3)]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    if kind == "circle":
        core = np.hypot(np.hypot(gx, gy) - R, gz)
    else:
        t = np.clip(gx, 0.0, length)
        core = np.sqrt((gx - t) ** 2 + gy ** 2 + gz ** 2)
    inside = core <= eps + 1e-12
    ids = -np.ones(inside.shape, dtype=np.int64)
    ids[inside] = np.arange(int(inside.sum()))
    chunks = []
    offsets = [
        (dx, dy, dz)
        for dx in (0, 1)
        for dy in (-1, 0, 1)
        for dz in (-1, 0, 1)
        if (dx, dy, dz) > (0, 0, 0)
    ]
    for off in offsets:
        b = np.roll(ids, tuple(-o for o in off), axis=(0, 1, 2))
        mask = inside.copy()
        for ax, o in enumerate(off):
            if o == 1:
                idx = [slice(None)] * 3
                idx[ax] = slice(-1, None)
                mask[tuple(idx)] = False
            elif o == -1:
                idx = [slice(None)] * 3
                idx[ax] = slice(0, 1)
                mask[tuple(idx)] = False
        mask &= b >= 0
        chunks.append(np.stack([ids[mask], b[mask]], axis=1))
    pts = np.stack([gx[inside], gy[inside], gz[inside]], axis=1)
    boundary = core[inside] >= eps - 1.05 * g
    return _assemble(
        pts, np.concatenate(chunks), boundary, h,
        {"kind": kind, "eps": eps, "R": R, "length": length},
    )


# -------------------------------------------- flattening discs (Example 5)


def flattened_disc(i: int, h: float = 0.1) -> SampledManifold:
    """Solid ellipsoid x^2 + y^2 + (z i)^2 <= 1: a convex D^3 flattening to
    the unit disc as i grows. Boundary = top/bottom shell of each column."""
    c = 1.0 / i
    base, _ = _hex_disc(1.0, h)
    rho2 = (base ** 2).sum(axis=1)
    zmax = c * np.sqrt(np.maximum(0.0, 1.0 - rho2))
    thin = zmax < h / 4
    cols = np.flatnonzero(~thin)
    singles = np.flatnonzero(thin)
    layers = max(2, int(round(2 * c / h)) + 1)
    zfrac = np.linspace(-1.0, 1.0, layers)
    col_pts = []
    for t in zfrac:
        col_pts.append(
            np.column_stack([base[cols], zmax[cols] * t])
        )
    p_cols = np.concatenate(col_pts, axis=0)
    p_single = np.column_stack([base[singles], np.zeros(len(singles))])
    p = np.concatenate([p_cols, p_single], axis=0)
    nc = len(cols)
    be, _ = neighbor_graph(base, k=8, radius_factor=1.35)
    col_of = -np.ones(len(base), dtype=np.int64)
    col_of[cols] = np.arange(nc)
    col_of_s = -np.ones(len(base), dtype=np.int64)
    col_of_s[singles] = nc * layers + np.arange(len(singles))
    cc = be[(col_of[be[:, 0]] >= 0) & (col_of[be[:, 1]] >= 0)]
    cc = np.stack([col_of[cc[:, 0]], col_of[cc[:, 1]]], axis=1)
    e = [_layered_edges(cc, nc, layers)]
    mix = be[(col_of[be[:, 0]] >= 0) ^ (col_of[be[:, 1]] >= 0)]
    for a, b in mix:
        fat, single = (a, b) if col_of[a] >= 0 else (b, a)
        for t in range(layers):
            e.append(
                np.array([[col_of[fat] + t * nc, col_of_s[single]]])
            )
    ss = be[(col_of[be[:, 0]] < 0) & (col_of[be[:, 1]] < 0)]
    if len(ss):
        e.append(np.stack([col_of_s[ss[:, 0]], col_of_s[ss[:, 1]]], axis=1))
    boundary = np.zeros(len(p), dtype=bool)
    boundary[:nc] = True
    boundary[(layers - 1) * nc: layers * nc] = True
    boundary[nc * layers:] = True
    return _assemble(p, np.concatenate(e), boundary, h, {"i": i, "c": c})


# ------------------------------------- plane / sphere minus ball (App. A)


def plane_minus_ball(r: float = 1.0, outer: float = 6.0, h: float = 0.07) -> SampledManifold:
    """Annulus r <= |x| <= outer sampled on staggered polar rings with a
    wide stencil; edges whose chord would cut into the hole are dropped.
    Inner rim (the obstacle) and outer rim are boundary."""
    if not 0 < r < outer:
        raise ValueError("need 0 < r < outer")
    dr = h * math.sqrt(3) / 2
    n_r = max(2, int(round((outer - r) / dr)))
    pts = []
    ring_of = []
    for jj in range(n_r + 1):
        rho = r + dr * jj
        m_j = max(16, int(round(2 * math.pi * rho / h)))
        ang = 2 * math.pi * (np.arange(m_j) + 0.5 * (jj % 2)) / m_j
        pts.append(np.stack([rho * np.cos(ang), rho * np.sin(ang)], axis=1))
        ring_of.append(np.full(m_j, jj))
    p = np.concatenate(pts, axis=0)
    ring = np.concatenate(ring_of)
    e, w = neighbor_graph(p, k=28, radius_factor=3.0)
    # chord sag test: a chord with both ends on the rim circle dips to
    # radius sqrt(r^2 - (w/2)^2); anything deeper tunnels through the hole
    a, b = p[e[:, 0]], p[e[:, 1]]
    ab = b - a
    t = np.clip(-(a * ab).sum(1) / np.maximum((ab * ab).sum(1), 1e-30), 0.0, 1.0)
    closest = np.linalg.norm(a + t[:, None] * ab, axis=1)
    keep = closest >= np.sqrt(np.maximum(r * r - 0.25 * w ** 2, 0.0)) - 1e-9
    boundary = (ring == 0) | (ring == n_r)
    return _assemble(
        p, e[keep], boundary, h,
        {"r": r, "outer": outer, "inner_count": int((ring == 0).sum())},
    )


def wrapping_half_length(m: SampledManifold, p_index: int) -> float:
    """Half-length of the shortest loop through a point winding around the
    origin of the first two coordinates (the hole of an annulus, the circle
    factor of a torus or cylinder).

    Measured in the two-sheet cut cover: a branch cut runs along the ray
    opposite the positive x-axis; edges crossing it switch sheets, and the
    loop is the shortest path between the two copies of the point.
    """
    if m.points is None or m.points.shape[1] < 2:
        raise ValueError("wrapping measurement needs embedded points")
    n = m.n
    for delta in (1e-4, 3.1e-4, 9.3e-4):
        theta = np.arctan2(m.points[:, 1], m.points[:, 0]) + delta
        theta = np.mod(theta + math.pi, 2 * math.pi) - math.pi
        if np.abs(np.abs(theta) - math.pi).min() > 1e-8:
            break
    cross = np.abs(theta[m.edges[:, 0]] - theta[m.edges[:, 1]]) > math.pi
    e, w = m.edges, m.edge_lengths
    plain, sw = e[~cross], e[cross]
    rows = np.concatenate(
        [plain[:, 0], plain[:, 0] + n, sw[:, 0], sw[:, 0] + n]
    )
    cols = np.concatenate(
        [plain[:, 1], plain[:, 1] + n, sw[:, 1] + n, sw[:, 1]]
    )
    ww = np.concatenate([w[~cross], w[~cross], w[cross], w[cross]])
    g = csr_matrix(
        (np.concatenate([ww, ww]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(2 * n, 2 * n),
    )
    d = dijkstra(g, directed=False, indices=p_index)
    if not np.isfinite(d[p_index + n]):
        raise ValueError("no wrapping loop found (cut cover disconnected)")
    return float(d[p_index + n]) / 2.0


# ------------------------------------------------------------- dispatch


def generate(spec: ExampleSpec) -> SampledManifold:
    """Build the sampled manifold of a gallery family."""
    i, h, q = spec.i, spec.h, dict(spec.params)
    if spec.family == "gaussian_slab":
        return gaussian_slab(i, q.pop("domain_radius", 2.0), h or 0.1)
    if spec.family == "thin_torus":
        return thin_torus(i, h)
    if spec.family == "capsule_cross_circle":
        return capsule_cross_circle(
            i,
            eps=q.pop("eps", None),
            r=q.pop("r", 1.0),
            h=h,
            fiber_n=int(q.pop("fiber_n", 12)),
        )
    if spec.family == "tube_neighborhood":
        return tube_neighborhood(
            kind=q.pop("kind", "circle"),
            eps=q.pop("eps", 0.2),
            R=q.pop("R", 1.0),
            length=q.pop("length", 1.0),
            h=h or 0.05,
        )
    if spec.family == "flattened_disc":
        return flattened_disc(i, h or 0.1)
    if spec.family == "plane_minus_ball":
        return plane_minus_ball(
            r=q.pop("r", 1.0), outer=q.pop("outer", 6.0), h=h or 0.07
        )
    if spec.family == "sphere_minus_ball":
        return sphere_minus_ball(r=q.pop("r", 0.8), h=h or 0.07)
    if spec.family == "thin_cylinder":
        radius = q.pop("radius", 1.0 / i)
        height = q.pop("height", 1.0 / i)
        return thin_cylinder(radius, height, h or radius / 3)
    raise ValueError(f"unknown family {spec.family!r}")


def ground_truth(spec: ExampleSpec) -> dict:
    """Closed-form quantities of a family; keys absent when no formula."""
    i = spec.i
    q = spec.params
    if spec.family == "gaussian_slab":
        # max principal curvature of the Gaussian graph is 2 (at the apex)
        return {
            "lambda": 2.0,
            "limit_curv_lower": -4.0,
            "interior_curv": 0.0,
            "thickness": 1.0 / i,
        }
    if spec.family == "thin_torus":
        return {
            "inj": math.pi / i,
            "diameter": math.hypot(math.pi / i, 2.0 / i),
            "interior_curv": 0.0,
            "boundary_ii": 0.0,
        }
    if spec.family == "capsule_cross_circle":
        eps = q.get("eps") or i ** -0.5
        return {
            "eps_i": eps,
            "inradius": eps * (math.pi / 2 + math.asin(1.0 / (i * eps))),
            "limit_curv_lower": 0.0,
        }
    if spec.family == "tube_neighborhood":
        kind = q.get("kind", "circle")
        eps = q.get("eps", 0.2)
        out = {"hausdorff_to_core": eps, "interior_curv": 0.0}
        if kind == "circle":
            out["limit_diam"] = math.pi * q.get("R", 1.0)
        else:
            out["limit_diam"] = q.get("length", 1.0)
        return out
    if spec.family == "flattened_disc":
        return {"limit_diam": 2.0, "c": 1.0 / i, "interior_curv": 0.0}
    if spec.family == "plane_minus_ball":
        r = q.get("r", 1.0)
        R = q.get("R", 1.0)  # query point sits at distance R from the ball
        return {
            "wrap_half_length": math.sqrt((R + r) ** 2 - r ** 2)
            + r * (math.pi / 2 + math.asin(r / (R + r))),
            "query_R": R,
        }
    if spec.family == "sphere_minus_ball":
        r = q.get("r", 0.8)
        return {"boundary_inj": math.pi - r, "inradius": math.pi - r}
    if spec.family == "thin_cylinder":
        radius = q.get("radius", 1.0 / i)
        height = q.get("height", 1.0 / i)
        return {
            "diameter": math.hypot(math.pi * radius, height),
            "inj": math.pi * radius,
            "interior_curv": 0.0,
        }
    raise ValueError(f"unknown family {spec.family!r}")
