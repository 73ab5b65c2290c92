"""
Run configuration and the JSON run report.

``RunConfig`` is validated once per command: lengths given as ratios of the
reach are converted to absolute values here and nowhere else, and the
validated config is echoed into the report so a run can be replayed from it.
"""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from src import __version__
from src.conditions.report import ConditionReport
from src.manifolds.base import AnalyticManifold
from src.manifolds.parse import parse_surface
from src.restricted.pipeline import RestrictedSummary
from src.sampling.sampler import SampleReport
from src.squash.trace import TraceSummary
from src.squash.verification import VerificationReport
from src.topology.certificate import TopologyCertificate

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = "1.0"

_RATIO_TOL = 1e-12


class Mode(str, Enum):
    NAIVE = "naive"
    PRACTICAL = "practical"
    NONCROSSING = "noncrossing"
    RESTRICTED = "restricted"


class RunConfig(BaseModel):
    """Everything a command needs; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    command: Literal["sample", "reconstruct", "verify", "region"]
    surface: Optional[str] = Field(default=None, description="One-line surface description")
    epsilon: Optional[float] = Field(default=None, gt=0.0)
    delta: Optional[float] = Field(default=None, ge=0.0)
    alpha: Optional[float] = Field(default=None, ge=0.0)
    epsilon_ratio: Optional[float] = Field(default=None, gt=0.0, description="epsilon / R")
    delta_ratio: Optional[float] = Field(default=None, ge=0.0, description="delta / R")
    alpha_ratio: Optional[float] = Field(default=None, ge=0.0, description="alpha / R")
    reach: Optional[float] = Field(default=None, gt=0.0, description="R of the surface, filled in on validation")
    seed: int = Field(default=0, ge=0)
    mode: Mode = Mode.NAIVE
    region_mode: Literal["naive", "practical", "both"] = "both"
    grid: int = Field(default=400, ge=2)
    input: Optional[str] = None
    mesh: Optional[str] = Field(default=None, description="Mesh to verify")
    output: Optional[str] = None
    trace_path: Optional[str] = None
    report_path: Optional[str] = None
    dump_dual: Optional[str] = Field(default=None, description="Write the initial dual graph as DOT here")
    snapshot_every: int = Field(default=0, ge=0)
    verify: bool = True
    cache: Optional[str] = Field(default=None, description="Alpha-complex cache (.npz)")
    tolerances: dict[str, float] = Field(default_factory=dict)

    _manifold: Optional[AnalyticManifold] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _resolve_ratios(self) -> "RunConfig":
        pairs = (("epsilon", "epsilon_ratio"), ("delta", "delta_ratio"), ("alpha", "alpha_ratio"))
        if not any(getattr(self, ratio) is not None for _, ratio in pairs):
            return self
        manifold = self.manifold()
        if manifold is None:
            raise ValueError("lengths given as ratios of R need a surface")
        if manifold.reach_is_infinite:
            raise ValueError(f"{manifold.kind} has no finite reach; give absolute lengths")
        self.reach = manifold.reach
        for absolute, ratio in pairs:
            r = getattr(self, ratio)
            if r is None:
                continue
            value = r * manifold.reach
            current = getattr(self, absolute)
            if current is None:
                setattr(self, absolute, value)
            elif not math.isclose(current, value, rel_tol=_RATIO_TOL, abs_tol=_RATIO_TOL):
                raise ValueError(f"{absolute}={current} disagrees with {ratio}={r} at R={manifold.reach}")
        return self

    def manifold(self) -> Optional[AnalyticManifold]:
        """The parsed surface, or ``None`` when no surface was given."""
        if self.surface is None:
            return None
        if self._manifold is None:
            self._manifold = parse_surface(self.surface)
        return self._manifold


class NonCrossingSummary(BaseModel):
    equals_core: bool
    steps: int
    missing_from_output: list[list[int]] = Field(default_factory=list)
    extra_in_output: list[list[int]] = Field(default_factory=list)


class RegionSummary(BaseModel):
    mode: str
    rows: int
    naive_feasible: int
    practical_feasible: int
    thresholds: dict[str, Optional[float]] = Field(
        default_factory=dict, description="Largest feasible eps/R at the quoted alpha/R values"
    )


class RunReport(BaseModel):
    """The JSON document every command writes next to its artifacts."""

    model_config = ConfigDict(extra="forbid")

    schema_version: str = REPORT_SCHEMA_VERSION
    version: str = __version__
    config: RunConfig
    seed: int
    sample: Optional[SampleReport] = None
    conditions: Optional[ConditionReport] = None
    verification: Optional[VerificationReport] = None
    trace: Optional[TraceSummary] = None
    certificate: Optional[TopologyCertificate] = None
    restricted: Optional[RestrictedSummary] = None
    non_crossing: Optional[NonCrossingSummary] = None
    region: Optional[RegionSummary] = None
    gates_passed: Optional[bool] = Field(default=None, description="Hypothesis gate of the chosen algorithm")
    outputs: dict[str, str] = Field(default_factory=dict)
    timing: dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds per phase")
    exit_code: int = 0


def report_schema() -> dict[str, Any]:
    """JSON schema of ``RunReport``, tagged with its version."""
    schema = RunReport.model_json_schema()
    schema["$id"] = f"vertical-squash/run-report/{REPORT_SCHEMA_VERSION}"
    schema["version"] = REPORT_SCHEMA_VERSION
    return schema


def report_json(report: RunReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_report(report: RunReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(report), encoding="utf-8")
    logger.info("Wrote report to %s", path)
    return path


def read_report(path: str | Path) -> RunReport:
    """
    Load and validate a report.

    Raises:
        pydantic.ValidationError: When the document does not follow the schema.
    """
    return RunReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
