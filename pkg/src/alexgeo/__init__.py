"""alexgeo: comparison geometry for finite sampled metric spaces.

Model-space trigonometry, Alexandrov-type curvature bound tests on samples,
warped-product boundary collars, quotient gluings and Gromov-Hausdorff
approximation estimates, plus a gallery of reference examples and a CLI.
"""

from .model_space import (
    arc_chord_cubic_coefficient,
    arc_length_from_chord,
    arc_width_and_base_angle,
    comparison_angle,
    excess_angle_lower_bound,
    focal_radius_lower_bound,
    side_from_hinge,
)
from .metric_core import (
    FiniteMetricSpace,
    RadiiReport,
    SampledManifold,
    discrete_geodesic,
    disjoint_union,
    eps_net,
    hausdorff_distance,
    intrinsic_metric,
    metric_sample,
    neighbor_graph,
    radii_report,
)
from .curvature import (
    CurvatureBounds,
    c2_convexity_check,
    cat_midpoint_test,
    cbb_quadruple_test,
    estimate_lower_bound,
    limit_convexity_check,
)
from .collar import (
    CollarExtension,
    WarpProfile,
    adaptive_profile,
    build_extension,
    projection,
    radial_bound,
    tangential_bound,
    warp_profile,
)
from .gh import (
    ApproxMap,
    GluingInstance,
    exhaustive_search,
    gh_bounds,
    glue,
    glued_space,
    gluing_limit_check,
    quotient_metric,
    search_approx,
    verify_approx,
    warped_limit_map,
    warped_product,
)
from .gallery import ExampleSpec, generate, ground_truth

__version__ = "0.1.0"

__all__ = [
    "arc_chord_cubic_coefficient",
    "arc_length_from_chord",
    "arc_width_and_base_angle",
    "comparison_angle",
    "excess_angle_lower_bound",
    "focal_radius_lower_bound",
    "side_from_hinge",
    "FiniteMetricSpace",
    "RadiiReport",
    "SampledManifold",
    "discrete_geodesic",
    "disjoint_union",
    "eps_net",
    "hausdorff_distance",
    "intrinsic_metric",
    "metric_sample",
    "neighbor_graph",
    "radii_report",
    "CurvatureBounds",
    "c2_convexity_check",
    "cat_midpoint_test",
    "cbb_quadruple_test",
    "estimate_lower_bound",
    "limit_convexity_check",
    "CollarExtension",
    "WarpProfile",
    "adaptive_profile",
    "build_extension",
    "projection",
    "radial_bound",
    "tangential_bound",
    "warp_profile",
    "ApproxMap",
    "GluingInstance",
    "exhaustive_search",
    "gh_bounds",
    "glue",
    "glued_space",
    "gluing_limit_check",
    "quotient_metric",
    "search_approx",
    "verify_approx",
    "warped_limit_map",
    "warped_product",
    "ExampleSpec",
    "generate",
    "ground_truth",
]
