"""Sampled curvature-bound tests.

Lower bounds (CBB side) are probed with the quadruple comparison-angle
test: for curvature >= k the three comparison angles at a common vertex
never sum to more than 2 pi. Upper bounds (CAT side) are probed with the
midpoint/median comparison. Both report the worst witness and treat
violations below the mesh noise floor 5 * (mesh_scale / shortest side) as
inconclusive mesh noise; sides shorter than 3 mesh_scale are skipped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .metric_core import FiniteMetricSpace
from .model_space import comparison_angle, side_from_hinge

__all__ = [
    "QuadrupleReport",
    "TriangleReport",
    "CurvatureBounds",
    "ConvexityReport",
    "ConvexityInstance",
    "cbb_quadruple_test",
    "cat_midpoint_test",
    "estimate_lower_bound",
    "c2_convexity_check",
    "limit_convexity_check",
]

NOISE_FACTOR = 5.0
MIN_SIDE_FACTOR = 3.0


@dataclass
class QuadrupleReport:
    k: float
    passed: bool
    max_excess: float              # worst raw angle-sum excess over 2 pi
    max_excess_adjusted: float     # worst excess after the noise floor
    n_tested: int
    n_skipped: int
    n_inconclusive: int
    diameter_ok: bool
    worst: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = dict(self.__dict__)
        doc["schema"] = "cbb-quadruple-report/1"
        return json.dumps(doc, sort_keys=True, default=float)


@dataclass
class TriangleReport:
    k: float
    passed: bool
    max_violation: float
    n_tested: int
    n_skipped: int
    worst: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = dict(self.__dict__)
        doc["schema"] = "cat-midpoint-report/1"
        return json.dumps(doc, sort_keys=True, default=float)


@dataclass
class CurvatureBounds:
    k_lower: float
    k_upper: float
    confidence: int
    bracket: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if math.isfinite(self.k_lower) and math.isfinite(self.k_upper):
            if self.k_lower > self.k_upper:
                raise ValueError("k_lower must not exceed k_upper")


def _sample_quadruples(
    X: FiniteMetricSpace,
    n_samples: int,
    rng: np.random.Generator,
    small_scale_fraction: float = 0.5,
) -> list[tuple[int, int, int, int]]:
    """Stratified quadruples (p; a, b, c): a small_scale_fraction of them has
    all pairwise distances below diameter/10, the rest is uniform."""
    n = X.n
    if n < 4:
        return []
    diam = X.diameter
    quads: list[tuple[int, int, int, int]] = []
    n_small = int(round(small_scale_fraction * n_samples))
    attempts = 0
    while len(quads) < n_small and attempts < 20 * n_small:
        attempts += 1
        p = int(rng.integers(0, n))
        near = np.flatnonzero(X.dist[p] < diam / 10.0)
        near = near[near != p]
        if len(near) < 3:
            continue
        abc = rng.choice(near, size=3, replace=False)
        # enforce the scale on all six pairs
        idx = np.array([p, *abc])
        if X.dist[np.ix_(idx, idx)].max() < diam / 10.0:
            quads.append((p, int(abc[0]), int(abc[1]), int(abc[2])))
    while len(quads) < n_samples:
        idx = rng.choice(n, size=4, replace=False)
        quads.append(tuple(int(v) for v in idx))
    return quads


def _evaluate_cbb(
    X: FiniteMetricSpace,
    quads: list[tuple[int, int, int, int]],
    k: float,
    mesh_scale: float,
) -> QuadrupleReport:
    d = X.dist
    two_pi = 2.0 * math.pi
    diameter_ok = True
    if k > 0:
        diameter_ok = X.diameter <= math.pi / math.sqrt(k) + 2.0 * mesh_scale + 1e-12
    max_raw = -math.inf
    max_adj = -math.inf
    worst: dict = {}
    tested = skipped = inconclusive = 0
    for (p, a, b, c) in quads:
        sides = np.array(
            [d[p, a], d[p, b], d[p, c], d[a, b], d[b, c], d[c, a]]
        )
        if sides.min() < MIN_SIDE_FACTOR * mesh_scale or sides.min() <= 0:
            skipped += 1
            continue
        try:
            s = (
                comparison_angle(d[p, a], d[p, b], d[a, b], k)
                + comparison_angle(d[p, b], d[p, c], d[b, c], k)
                + comparison_angle(d[p, c], d[p, a], d[c, a], k)
            )
        except ValueError:
            inconclusive += 1
            continue
        tested += 1
        excess = s - two_pi
        floor = NOISE_FACTOR * mesh_scale / sides.min()
        adj = excess - floor
        if excess > max_raw:
            max_raw = excess
        if adj > max_adj:
            max_adj = adj
            worst = {
                "quadruple": [p, a, b, c],
                "angle_sum": s,
                "excess": excess,
                "noise_floor": floor,
                "sides": sides.tolist(),
            }
    if tested == 0:
        max_raw = max_adj = 0.0
    passed = diameter_ok and max_adj <= 0.0
    return QuadrupleReport(
        k=k,
        passed=passed,
        max_excess=max_raw,
        max_excess_adjusted=max_adj,
        n_tested=tested,
        n_skipped=skipped,
        n_inconclusive=inconclusive,
        diameter_ok=diameter_ok,
        worst=worst,
    )


def cbb_quadruple_test(
    X: FiniteMetricSpace,
    k: float,
    n_samples: int = 400,
    seed: int = 0,
    mesh_scale: float = 0.0,
) -> QuadrupleReport:
    """Quadruple comparison-angle test for curvature >= k.

    For k > 0 the diameter must also respect pi/sqrt(k) (up to mesh slack);
    a larger diameter is itself a failure witness. Model-space domain
    errors (spherical perimeter bound) count as inconclusive quadruples.
    """
    rng = np.random.default_rng(seed)
    quads = _sample_quadruples(X, n_samples, rng)
    return _evaluate_cbb(X, quads, k, mesh_scale)


def cat_midpoint_test(
    X: FiniteMetricSpace,
    k: float,
    n_samples: int = 200,
    seed: int = 0,
    mesh_scale: float = 0.0,
    max_side: float | None = None,
) -> TriangleReport:
    """Midpoint/median comparison test for curvature <= k.

    For sampled triangles (a, b, c), the discrete midpoint m of [a, b] must
    satisfy d(c, m) <= model median + slack, where the model median comes
    from the k-model hinge and slack covers the midpoint resolution defect
    plus mesh noise. Triangles with perimeter >= 2 pi/sqrt(k) are exempt
    (k > 0), as are sides beyond max_side when given.
    """
    rng = np.random.default_rng(seed)
    d = X.dist
    n = X.n
    max_viol = -math.inf
    worst: dict = {}
    tested = skipped = 0
    for _ in range(n_samples):
        a, b, c = (int(v) for v in rng.choice(n, size=3, replace=False))
        ab, ac, bc = d[a, b], d[a, c], d[b, c]
        sides = np.array([ab, ac, bc])
        if sides.min() < MIN_SIDE_FACTOR * mesh_scale or sides.min() <= 0:
            skipped += 1
            continue
        if max_side is not None and sides.max() > max_side:
            skipped += 1
            continue
        if k > 0 and ab + ac + bc >= 2.0 * math.pi / math.sqrt(k):
            skipped += 1
            continue
        dev = np.maximum(np.abs(d[a] - 0.5 * ab), np.abs(d[b] - 0.5 * ab))
        m = int(np.argmin(dev))
        e_m = float(dev[m])
        if e_m > 3.0 * mesh_scale + 0.05 * ab:
            skipped += 1  # no usable midpoint at this resolution
            continue
        try:
            gamma_a = comparison_angle(ab, ac, bc, k)
            median = side_from_hinge(ac, 0.5 * ab, gamma_a, k)
        except ValueError:
            skipped += 1
            continue
        slack = e_m + NOISE_FACTOR * mesh_scale
        viol = d[c, m] - median - slack
        tested += 1
        if viol > max_viol:
            max_viol = viol
            worst = {
                "triangle": [a, b, c],
                "midpoint": m,
                "measured": float(d[c, m]),
                "model_median": float(median),
                "slack": slack,
                "sides": sides.tolist(),
            }
    if tested == 0:
        max_viol = 0.0
    return TriangleReport(
        k=k,
        passed=max_viol <= 0.0,
        max_violation=max_viol,
        n_tested=tested,
        n_skipped=skipped,
        worst=worst,
    )


def estimate_lower_bound(
    X: FiniteMetricSpace,
    n_samples: int = 400,
    seed: int = 0,
    mesh_scale: float = 0.0,
    k_range: tuple[float, float] = (-100.0, 100.0),
    steps: int = 40,
) -> CurvatureBounds:
    """Bisect for the largest k passing the quadruple test.

    The quadruple sample is drawn once (seeded) and reused for every k, so
    the pass predicate is monotone in k and two runs with the same seed
    return identical brackets. Returns k_lower = -inf when even the bottom
    of the range fails and k_lower = top when everything passes.
    """
    rng = np.random.default_rng(seed)
    quads = _sample_quadruples(X, n_samples, rng)

    def ok(k: float) -> bool:
        return _evaluate_cbb(X, quads, k, mesh_scale).passed

    lo, hi = k_range
    if not ok(lo):
        return CurvatureBounds(-math.inf, math.inf, len(quads), bracket=(-math.inf, lo))
    if ok(hi):
        return CurvatureBounds(hi, math.inf, len(quads), bracket=(hi, math.inf))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return CurvatureBounds(lo, math.inf, len(quads), bracket=(lo, hi))


@dataclass
class ConvexityReport:
    C: float
    rho: float
    passed: bool
    worst_violation: float
    worst_pair: tuple[int, int] | None
    n_eligible: int


def c2_convexity_check(
    X: FiniteMetricSpace,
    d_Z: FiniteMetricSpace,
    z_indices: np.ndarray,
    C: float,
    rho: float,
    slack: float = 0.0,
) -> ConvexityReport:
    """Check the cubic convexity estimate d_Z <= d_X + C d_X^3 + slack for
    all subset pairs lying in a common rho-ball around a subset point.

    d_Z is the intrinsic metric of the subset (aligned with z_indices into
    X). The worst additive violation and its pair are reported.
    """
    z = np.asarray(z_indices, dtype=int)
    m = len(z)
    if d_Z.n != m:
        raise ValueError("d_Z must be aligned with z_indices")
    dxz = X.dist[np.ix_(z, z)]
    inball = dxz <= rho
    eligible = (inball.astype(np.int64) @ inball.astype(np.int64).T) > 0
    np.fill_diagonal(eligible, False)
    viol = d_Z.dist - (dxz + C * dxz ** 3) - slack
    viol[~eligible] = -np.inf
    n_eligible = int(eligible.sum()) // 2
    if n_eligible == 0:
        return ConvexityReport(C, rho, True, 0.0, None, 0)
    flat = int(np.argmax(viol))
    i, j = divmod(flat, m)
    worst = float(viol[i, j])
    return ConvexityReport(C, rho, worst <= 0.0, worst, (i, j), n_eligible)


@dataclass
class ConvexityInstance:
    """One element of a convergent sequence: an ambient space, the intrinsic
    metric of the distinguished subset, its indices, the approximation map
    to the limit ambient space, and the certified radius."""

    X: FiniteMetricSpace
    d_Z: FiniteMetricSpace
    z_indices: np.ndarray
    to_limit: "object"  # ApproxMap
    rho: float


def limit_convexity_check(
    instances: list[ConvexityInstance],
    X_limit: FiniteMetricSpace,
    dZ_limit: FiniteMetricSpace,
    z_limit: np.ndarray,
    C: float,
    rho_limit: float | None = None,
    slack: float = 0.0,
) -> ConvexityReport:
    """Stability of cubic convexity under convergence: given per-instance
    certificates at radius rho, verify the limit subset at radius rho/2.

    The limit inequality is allowed the approximation slack of the best
    instance: with eps the smallest measured map quality, each limit pair at
    distance t inherits d <= t + C t^3 + chain(eps, t) where
    chain = 2 eps + C ((t + eps)^3 - t^3). Raises when an instance
    certificate fails or when rho_limit exceeds half the certified radius.
    """
    from .gh import verify_approx

    if not instances:
        raise ValueError("need at least one instance")
    rho_min = min(inst.rho for inst in instances)
    if rho_limit is None:
        rho_limit = 0.5 * rho_min
    if rho_limit > 0.5 * rho_min + 1e-12:
        raise ValueError(
            f"limit radius {rho_limit} exceeds half the certified radius {rho_min}"
        )
    for t, inst in enumerate(instances):
        rep = c2_convexity_check(inst.X, inst.d_Z, inst.z_indices, C, inst.rho, slack)
        if not rep.passed:
            raise ValueError(
                f"instance {t} certificate fails at (C={C}, rho={inst.rho}): "
                f"violation {rep.worst_violation:.6g}"
            )
    eps = min(verify_approx(inst.to_limit) for inst in instances)

    z = np.asarray(z_limit, dtype=int)
    m = len(z)
    dxz = X_limit.dist[np.ix_(z, z)]
    inball = dxz <= rho_limit
    eligible = (inball.astype(np.int64) @ inball.astype(np.int64).T) > 0
    np.fill_diagonal(eligible, False)
    chain = 2.0 * eps + C * ((dxz + eps) ** 3 - dxz ** 3)
    viol = dZ_limit.dist - (dxz + C * dxz ** 3) - chain - slack
    viol[~eligible] = -np.inf
    n_eligible = int(eligible.sum()) // 2
    if n_eligible == 0:
        return ConvexityReport(C, rho_limit, True, 0.0, None, 0)
    flat = int(np.argmax(viol))
    i, j = divmod(flat, m)
    worst = float(viol[i, j])
    return ConvexityReport(C, rho_limit, worst <= 0.0, worst, (i, j), n_eligible)
