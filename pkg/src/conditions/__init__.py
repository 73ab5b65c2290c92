"""Sampling conditions, angle bounds, the feasibility region and measured hypothesis reports."""

from src.conditions.bounds import (
    SamplingParams,
    angular_deviation_spread_bound,
    beta_of,
    edge_angle_bound,
    interval_I,
    purity_threshold,
    purity_threshold_check,
    strict_homotopy,
    strict_homotopy_branches,
    triangle_angle_bound,
)
from src.conditions.region import (
    REGION_COLUMNS,
    RegionMode,
    feasible_alpha_range,
    feasible_region_3d,
    is_feasible,
    max_feasible_epsilon,
    region_margin,
    with_points,
    write_region_csv,
)
from src.conditions.report import (
    ConditionMargin,
    ConditionReport,
    HypothesisGate,
    check_alpha_conditions,
)

__all__ = [
    "REGION_COLUMNS",
    "ConditionMargin",
    "ConditionReport",
    "HypothesisGate",
    "RegionMode",
    "SamplingParams",
    "angular_deviation_spread_bound",
    "beta_of",
    "check_alpha_conditions",
    "edge_angle_bound",
    "feasible_alpha_range",
    "feasible_region_3d",
    "interval_I",
    "is_feasible",
    "max_feasible_epsilon",
    "purity_threshold",
    "purity_threshold_check",
    "region_margin",
    "strict_homotopy",
    "strict_homotopy_branches",
    "triangle_angle_bound",
    "with_points",
    "write_region_csv",
]
