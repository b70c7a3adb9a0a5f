"""Finite metric spaces and sampled manifolds-with-boundary.

A SampledManifold is a weighted graph over sample points (optionally with
ambient coordinates); its intrinsic metric is the shortest-path metric.
A FiniteMetricSpace is a dense symmetric distance matrix with validation.
Disconnected unions carry a sentinel distance (1e6 x the largest finite
distance) rather than infinities, so downstream min-plus formulas stay
finite.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree

__all__ = [
    "FiniteMetricSpace",
    "SampledManifold",
    "RadiiReport",
    "intrinsic_metric",
    "metric_sample",
    "hausdorff_distance",
    "eps_net",
    "eps_net_graph",
    "radii_report",
    "discrete_geodesic",
    "neighbor_graph",
    "disjoint_union",
    "save_manifold_json",
    "load_manifold_json",
    "save_distance_csv",
]

APSP_CAP = 5000
SENTINEL_FACTOR = 1e6

MANIFOLD_SCHEMA = "sampled-manifold/1"


@dataclass
class FiniteMetricSpace:
    """Symmetric distance matrix over n labelled points."""

    dist: np.ndarray
    labels: list[str] | None = None

    def __post_init__(self) -> None:
        self.dist = np.asarray(self.dist, dtype=float)
        if self.dist.ndim != 2 or self.dist.shape[0] != self.dist.shape[1]:
            raise ValueError("dist must be a square matrix")

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    def validate(self, rng: np.random.Generator | None = None) -> None:
        """Check metric axioms; triangle inequality exhaustively for n <= 200,
        otherwise on 1e5 sampled triples."""
        d = self.dist
        n = self.n
        if not np.allclose(d, d.T, rtol=0, atol=1e-9 * max(1.0, d.max(initial=0))):
            raise ValueError("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0.0):
            raise ValueError("diagonal must be exactly zero")
        if np.any(d < 0):
            raise ValueError("negative distances")
        off = d[~np.eye(n, dtype=bool)]
        if off.size and np.any(off <= 0):
            raise ValueError("distinct points at zero distance")
        tol = 1e-8 * max(1.0, float(d.max(initial=0)))
        if n <= 200:
            for k in range(n):
                if np.any(d > d[:, k, None] + d[None, k, :] + tol):
                    raise ValueError(f"triangle inequality fails through point {k}")
        else:
            rng = rng or np.random.default_rng(0)
            m = 100_000
            i = rng.integers(0, n, m)
            j = rng.integers(0, n, m)
            k = rng.integers(0, n, m)
            if np.any(d[i, j] > d[i, k] + d[k, j] + tol):
                raise ValueError("triangle inequality fails on sampled triples")

    def restrict(self, indices: np.ndarray) -> "FiniteMetricSpace":
        idx = np.asarray(indices, dtype=int)
        labels = [self.labels[i] for i in idx] if self.labels else None
        return FiniteMetricSpace(self.dist[np.ix_(idx, idx)], labels)

    @staticmethod
    def from_points(points: np.ndarray, labels: list[str] | None = None) -> "FiniteMetricSpace":
        """Chordal (ambient Euclidean) metric on a point array."""
        p = np.asarray(points, dtype=float)
        diff = p[:, None, :] - p[None, :, :]
        return FiniteMetricSpace(np.sqrt((diff ** 2).sum(-1)), labels)


@dataclass
class SampledManifold:
    """Graph sample of a manifold-with-boundary.

    points may be None for abstract complexes whose metric is edge-defined
    (e.g. glued collars); when present, ambient dimension is 2-5 and edge
    weights of embedded meshes are ambient chords, so intrinsic >= chord
    holds by construction. mesh_scale is the max edge length; generators
    additionally record their sampling step under meta["h"].
    """

    points: np.ndarray | None
    edges: np.ndarray
    edge_lengths: np.ndarray
    boundary_mask: np.ndarray
    mesh_scale: float = 0.0
    embedding_faithful: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.edge_lengths = np.asarray(self.edge_lengths, dtype=float)
        self.boundary_mask = np.asarray(self.boundary_mask, dtype=bool)
        if self.points is not None:
            self.points = np.asarray(self.points, dtype=float)
            if not 2 <= self.points.shape[1] <= 5:
                raise ValueError("ambient dimension must be 2-5")
        if len(self.edge_lengths) != len(self.edges):
            raise ValueError("edge_lengths must match edges")
        if np.any(self.edge_lengths <= 0):
            raise ValueError("edge lengths must be positive")
        if self.mesh_scale == 0.0 and len(self.edge_lengths):
            self.mesh_scale = float(self.edge_lengths.max())

    @property
    def n(self) -> int:
        return len(self.boundary_mask)

    @property
    def boundary_indices(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_mask)

    def graph(self) -> csr_matrix:
        n = self.n
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = self.edge_lengths
        return csr_matrix(
            (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(n, n),
        )

    def validate(self, chord_pairs: int = 2000, rng: np.random.Generator | None = None) -> None:
        g = self.graph()
        ncomp, _ = connected_components(g, directed=False)
        if ncomp != 1:
            raise ValueError(f"sample graph must be connected, found {ncomp} components")
        bi = self.boundary_indices
        if 1 < len(bi):
            # boundary must be a closed subcomplex: every boundary vertex
            # has a boundary neighbor
            bset = np.zeros(self.n, dtype=bool)
            bset[bi] = True
            has_bnbr = np.zeros(self.n, dtype=bool)
            e = self.edges
            both = bset[e[:, 0]] & bset[e[:, 1]]
            has_bnbr[e[both, 0]] = True
            has_bnbr[e[both, 1]] = True
            if not np.all(has_bnbr[bi]):
                raise ValueError("boundary is not closed: isolated boundary vertex")
        if self.points is not None and self.embedding_faithful and self.n > 1:
            rng = rng or np.random.default_rng(0)
            m = min(chord_pairs, self.n * (self.n - 1) // 2)
            a = rng.integers(0, self.n, m)
            b = rng.integers(0, self.n, m)
            keep = a != b
            a, b = a[keep], b[keep]
            src = np.unique(a)
            d = dijkstra(g, directed=False, indices=src)
            look = {s: r for r, s in enumerate(src)}
            rows = np.array([look[x] for x in a], dtype=np.intp)
            intr = d[rows, b]
            chord = np.linalg.norm(self.points[a] - self.points[b], axis=1)
            if np.any(intr < chord - 1e-9 * max(1.0, chord.max(initial=0))):
                raise ValueError("intrinsic distance dips below ambient chord")


@dataclass
class RadiiReport:
    """Boundary-related radii of a sampled manifold."""

    inradius: float
    max_reach: float
    diameter: float
    boundary_diameter: float
    n_boundary: int
    mesh_scale: float
    extras: dict = field(default_factory=dict)


def intrinsic_metric(m: SampledManifold, indices: np.ndarray | None = None) -> FiniteMetricSpace:
    """Shortest-path metric of the sample graph (all pairs, or the pairwise
    metric of a subset computed from subset-rooted searches).

    Capped at 5000 source points; reduce with an eps-net first for larger
    samples.
    """
    g = m.graph()
    if indices is None:
        if m.n > APSP_CAP:
            raise ValueError(
                f"all-pairs shortest paths capped at n={APSP_CAP}; "
                "reduce with eps_net_graph / metric_sample first"
            )
        d = dijkstra(g, directed=False)
        return FiniteMetricSpace(_sentinelize(d))
    idx = np.asarray(indices, dtype=int)
    if len(idx) > APSP_CAP:
        raise ValueError(f"subset size exceeds the {APSP_CAP} cap")
    rows = dijkstra(g, directed=False, indices=idx)
    return FiniteMetricSpace(_sentinelize(rows[:, idx]))


def _sentinelize(d: np.ndarray) -> np.ndarray:
    """Replace infinities by the sentinel 1e6 x max finite distance."""
    if np.isinf(d).any():
        finite = d[np.isfinite(d)]
        s = SENTINEL_FACTOR * (finite.max() if finite.size else 1.0)
        d = np.where(np.isinf(d), s, d)
    return d


def metric_sample(
    m: SampledManifold, size: int, seed: int = 0, eps: float = 0.0
) -> tuple[FiniteMetricSpace, np.ndarray]:
    """Farthest-point subsample of at most `size` vertices together with its
    pairwise intrinsic metric; works on graphs of any size."""
    idx = eps_net_graph(m, eps=eps, max_points=size, seed=seed)
    return intrinsic_metric(m, idx), idx


def hausdorff_distance(X: FiniteMetricSpace, idx_a: np.ndarray, idx_b: np.ndarray) -> float:
    """Hausdorff distance between two nonempty subsets of a common space."""
    a = np.asarray(idx_a, dtype=int)
    b = np.asarray(idx_b, dtype=int)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("subsets must be nonempty")
    sub = X.dist[np.ix_(a, b)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def eps_net(X: FiniteMetricSpace, eps: float, start: int = 0) -> np.ndarray:
    """Farthest-point traversal eps-net: covering radius <= eps, pairwise
    separation >= eps. eps >= diameter yields a single point."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    n = X.n
    chosen = [start]
    mind = X.dist[start].copy()
    while True:
        nxt = int(np.argmax(mind))
        if mind[nxt] <= eps:
            break
        chosen.append(nxt)
        np.minimum(mind, X.dist[nxt], out=mind)
        if len(chosen) == n:
            break
    return np.array(chosen, dtype=int)


def eps_net_graph(
    m: SampledManifold, eps: float = 0.0, max_points: int = APSP_CAP, seed: int = 0
) -> np.ndarray:
    """Farthest-point net on the sample graph without a full matrix.

    Stops when the covering radius drops to eps or max_points is reached.
    Deterministic: starts from the seed index (mod n).
    """
    g = m.graph()
    n = m.n
    start = seed % n
    chosen = [start]
    mind = dijkstra(g, directed=False, indices=start)
    while len(chosen) < min(max_points, n):
        nxt = int(np.argmax(mind))
        if not np.isinf(mind[nxt]) and mind[nxt] <= eps:
            break
        chosen.append(nxt)
        np.minimum(mind, dijkstra(g, directed=False, indices=nxt), out=mind)
    return np.array(chosen, dtype=int)


def _diameter_estimate(g: csr_matrix, n: int, exact_cap: int = APSP_CAP) -> float:
    if n <= exact_cap:
        d = dijkstra(g, directed=False)
        d = _sentinelize(d)
        return float(d.max())
    # iterated double-sweep lower bound (exact on many meshes, always a
    # lower bound; good enough for reporting on oversized samples)
    src = 0
    best = 0.0
    for _ in range(4):
        d = dijkstra(g, directed=False, indices=src)
        d[np.isinf(d)] = -1.0
        nxt = int(np.argmax(d))
        best = max(best, float(d[nxt]))
        src = nxt
    return best


def radii_report(m: SampledManifold, spread_tol: float | None = None) -> RadiiReport:
    """Inradius, max reach, diameter and boundary diameter of the sample.

    Reach at a boundary footpoint only counts interior points whose incident
    edges do not jump between far-apart footpoints (cut-locus ridge filter);
    the spread tolerance defaults to max(6 mesh_scale, 0.05 diameter).
    """
    bi = m.boundary_indices
    if len(bi) == 0:
        raise ValueError("radii_report requires a nonempty boundary")
    g = m.graph()
    dist_b, _, feet = dijkstra(
        g, directed=False, indices=bi, min_only=True, return_predecessors=True
    )
    if np.isinf(dist_b).any():
        raise ValueError("boundary does not reach every component")
    inradius = float(dist_b.max())
    diameter = _diameter_estimate(g, m.n)
    if spread_tol is None:
        spread_tol = max(6.0 * m.mesh_scale, 0.05 * diameter)

    # footpoint positions: ambient when available, else boundary-rooted
    # graph positions are unavailable, fall back to foot identity jumps
    e = m.edges
    fu, fv = feet[e[:, 0]], feet[e[:, 1]]
    if m.points is not None:
        jump = np.linalg.norm(m.points[fu] - m.points[fv], axis=1) > spread_tol
    else:
        jump = fu != fv  # conservative without coordinates
        # allow adjacent feet: neighbors on the boundary subgraph are fine
        b_adj = {}
        bset = set(bi.tolist())
        for (i, j), w in zip(m.edges, m.edge_lengths):
            if i in bset and j in bset:
                b_adj.setdefault(i, set()).add(j)
                b_adj.setdefault(j, set()).add(i)
        ok = np.array(
            [(a == b) or (b in b_adj.get(a, ())) for a, b in zip(fu, fv)], dtype=bool
        )
        jump = ~ok
    ridge = np.zeros(m.n, dtype=bool)
    ridge[e[jump, 0]] = True
    ridge[e[jump, 1]] = True
    eligible = ~ridge
    eligible[bi] = False
    max_reach = float(dist_b[eligible].max()) if eligible.any() else 0.0

    # boundary diameter: max over boundary components of the intrinsic
    # diameter of the boundary subgraph
    bmap = -np.ones(m.n, dtype=int)
    bmap[bi] = np.arange(len(bi))
    be = m.edges[m.boundary_mask[m.edges[:, 0]] & m.boundary_mask[m.edges[:, 1]]]
    bw = m.edge_lengths[m.boundary_mask[m.edges[:, 0]] & m.boundary_mask[m.edges[:, 1]]]
    nb = len(bi)
    bg = csr_matrix(
        (
            np.concatenate([bw, bw]),
            (
                np.concatenate([bmap[be[:, 0]], bmap[be[:, 1]]]),
                np.concatenate([bmap[be[:, 1]], bmap[be[:, 0]]]),
            ),
        ),
        shape=(nb, nb),
    )
    if nb == 1:
        bdiam = 0.0
    elif nb <= APSP_CAP:
        db = dijkstra(bg, directed=False)
        db[np.isinf(db)] = 0.0  # across components: take per-component max
        bdiam = float(db.max())
    else:
        bdiam = _diameter_estimate(bg, nb)

    return RadiiReport(
        inradius=inradius,
        max_reach=max_reach,
        diameter=diameter,
        boundary_diameter=bdiam,
        n_boundary=int(nb),
        mesh_scale=m.mesh_scale,
        extras={"dist_to_boundary": dist_b, "footpoint": feet},
    )


def discrete_geodesic(m: SampledManifold, i: int, j: int) -> tuple[np.ndarray, float]:
    """Vertex path of a shortest path from i to j and its length."""
    g = m.graph()
    d, pred = dijkstra(g, directed=False, indices=i, return_predecessors=True)
    if np.isinf(d[j]):
        raise ValueError("no path between the requested vertices")
    path = [j]
    while path[-1] != i:
        path.append(int(pred[path[-1]]))
    return np.array(path[::-1], dtype=int), float(d[j])


def neighbor_graph(
    points: np.ndarray, k: int = 10, radius_factor: float = 1.5
) -> tuple[np.ndarray, np.ndarray]:
    """Generic cloud connectivity: k-nearest neighbors with a mutual radius
    cap (radius_factor x the median nearest-neighbor spacing)."""
    p = np.asarray(points, dtype=float)
    tree = cKDTree(p)
    dd, ii = tree.query(p, k=min(k + 1, len(p)))
    cap = radius_factor * float(np.median(dd[:, 1]))
    a = np.repeat(np.arange(len(p)), dd.shape[1] - 1)
    b = ii[:, 1:].ravel()
    keep = dd[:, 1:].ravel() <= cap
    a, b = a[keep], b[keep]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    e = np.unique(np.stack([lo, hi], axis=1), axis=0).astype(np.int64)
    w = np.linalg.norm(p[e[:, 0]] - p[e[:, 1]], axis=1)
    return e, w


def disjoint_union(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, sentinel: float | None = None
) -> tuple[FiniteMetricSpace, np.ndarray, np.ndarray]:
    """Disjoint union with the sentinel cross-distance; returns the union and
    the index arrays of the two summands.

    Pass an explicit sentinel when two unions must be comparable under an
    approximation map (cross-component pairs then agree exactly)."""
    nx, ny = X.n, Y.n
    finite_max = max(X.dist.max(initial=0.0), Y.dist.max(initial=0.0), 1e-12)
    s = SENTINEL_FACTOR * finite_max if sentinel is None else float(sentinel)
    d = np.full((nx + ny, nx + ny), s)
    d[:nx, :nx] = X.dist
    d[nx:, nx:] = Y.dist
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(d), np.arange(nx), np.arange(nx, nx + ny)


def save_manifold_json(m: SampledManifold, path: str) -> None:
    doc = {
        "schema": MANIFOLD_SCHEMA,
        "points": None if m.points is None else m.points.tolist(),
        "edges": m.edges.tolist(),
        "edge_lengths": m.edge_lengths.tolist(),
        "boundary": m.boundary_mask.astype(int).tolist(),
        "mesh_scale": m.mesh_scale,
        "embedding_faithful": m.embedding_faithful,
        "meta": {k: v for k, v in m.meta.items() if _json_ok(v)},
    }
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True)


def _json_ok(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False


def load_manifold_json(path: str) -> SampledManifold:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("schema") != MANIFOLD_SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    return SampledManifold(
        points=None if doc["points"] is None else np.array(doc["points"]),
        edges=np.array(doc["edges"], dtype=np.int64).reshape(-1, 2),
        edge_lengths=np.array(doc["edge_lengths"], dtype=float),
        boundary_mask=np.array(doc["boundary"], dtype=bool),
        mesh_scale=float(doc["mesh_scale"]),
        embedding_faithful=bool(doc.get("embedding_faithful", True)),
        meta=doc.get("meta", {}),
    )


def save_distance_csv(X: FiniteMetricSpace, path: str) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        labels = X.labels or [str(i) for i in range(X.n)]
        w.writerow(["label", *labels])
        for lab, row in zip(labels, X.dist):
            w.writerow([lab, *(f"{x:.12g}" for x in row)])
