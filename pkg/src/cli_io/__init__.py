"""File formats, run configuration and the JSON run report."""

from src.cli_io.formats import (
    load_complex,
    load_points,
    mesh_faces,
    read_edges,
    read_off,
    read_ply,
    read_xyz,
    save_complex,
    save_points,
    write_edges,
    write_off,
    write_ply,
    write_text,
    write_xyz,
)
from src.cli_io.reports import (
    REPORT_SCHEMA_VERSION,
    Mode,
    NonCrossingSummary,
    RegionSummary,
    RunConfig,
    RunReport,
    read_report,
    report_json,
    report_schema,
    write_report,
)

__all__ = [
    "Mode",
    "NonCrossingSummary",
    "REPORT_SCHEMA_VERSION",
    "RegionSummary",
    "RunConfig",
    "RunReport",
    "load_complex",
    "load_points",
    "mesh_faces",
    "read_edges",
    "read_off",
    "read_ply",
    "read_report",
    "read_xyz",
    "report_json",
    "report_schema",
    "save_complex",
    "save_points",
    "write_edges",
    "write_off",
    "write_ply",
    "write_report",
    "write_text",
    "write_xyz",
]
