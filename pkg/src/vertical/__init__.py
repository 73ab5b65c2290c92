"""Manifold-relative machinery: verticality, facet sides, dual graph, free simplices, skins."""

from src.vertical.angles import (
    AngleExtreme,
    BatchAngles,
    batch_angles,
    check_tube,
    is_vertical,
    max_angle_over_support,
    min_angle_over_support,
    tube_bound,
    vertex_angles,
)
from src.vertical.convexity import (
    BallUnion,
    Skins,
    VerticalConvexityReport,
    merge_intervals,
    offset_of,
    skins_and_subcomplexes,
    verify_vertical_convexity,
)
from src.vertical.dual_graph import DualGraph, build_dual_graph, circumcenter_heights
from src.vertical.free import (
    CollapseScheduler,
    FreeSide,
    VerticalFreeness,
    candidates,
    reference_hyperplane,
    vertically_free,
)
from src.vertical.sides import (
    FacetSide,
    SideTable,
    below_relation,
    compute_side_table,
    facet_sides,
)

__all__ = [
    "AngleExtreme",
    "BallUnion",
    "BatchAngles",
    "CollapseScheduler",
    "DualGraph",
    "FacetSide",
    "FreeSide",
    "SideTable",
    "Skins",
    "VerticalConvexityReport",
    "VerticalFreeness",
    "batch_angles",
    "below_relation",
    "build_dual_graph",
    "candidates",
    "check_tube",
    "circumcenter_heights",
    "compute_side_table",
    "facet_sides",
    "is_vertical",
    "max_angle_over_support",
    "merge_intervals",
    "min_angle_over_support",
    "offset_of",
    "reference_hyperplane",
    "skins_and_subcomplexes",
    "tube_bound",
    "verify_vertical_convexity",
    "vertex_angles",
    "vertically_free",
]
