"""
Collapse traces.

A trace records every collapse of a run in order, with the Euler
characteristic before and after, and is written as JSON lines: one header
line, one line per step and a closing summary line.
"""

import json
import logging
from pathlib import Path
from typing import Optional

import pandas as pd
from pydantic import BaseModel, Field

from src.topology.complex import SimplicialComplex

logger = logging.getLogger(__name__)


class CollapseStep(BaseModel):
    """One vertical collapse."""

    step: int
    tau: list[int]
    sigma: list[int]
    side: str = Field(description="from_above or from_below")
    removed: int = Field(description="Number of simplices deleted")
    euler_before: int
    euler_after: int
    dual_role: Optional[str] = Field(
        default=None, description="sink/source when the removed coface was one in the dual graph, else other"
    )
    height: Optional[float] = Field(default=None, description="Circumcenter height of sigma (non-crossing runs)")
    naive_agrees: Optional[bool] = Field(
        default=None, description="Practical runs with a diagnostic manifold: the manifold-relative test agrees"
    )
    spot_check: Optional[bool] = None


class TerminalState(BaseModel):
    """Shape of the complex when the loop stopped."""

    counts: list[int] = Field(description="Number of simplices per dimension")
    euler_characteristic: int
    top_simplices_left: int

    @classmethod
    def of(cls, K: SimplicialComplex) -> "TerminalState":
        d = K.ambient_dim
        return cls(
            counts=[K.count(k) for k in range(d + 1)],
            euler_characteristic=K.euler_characteristic(),
            top_simplices_left=K.count(d),
        )


class TraceSummary(BaseModel):
    algorithm: str
    steps: int
    initial_top_simplices: int
    euler_constant: bool
    from_above: int
    from_below: int
    disagreements: int = Field(default=0, description="Steps where the diagnostic naive test disagreed")
    spot_check_failures: int = 0
    terminal: Optional[TerminalState] = None


class SquashTrace(BaseModel):
    """Ordered collapses of one run."""

    algorithm: str
    initial_top_simplices: int
    initial_euler: int
    steps: list[CollapseStep] = Field(default_factory=list)
    terminal: Optional[TerminalState] = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def euler_constant(self) -> bool:
        return all(s.euler_before == s.euler_after == self.initial_euler for s in self.steps)

    def summary(self) -> TraceSummary:
        return TraceSummary(
            algorithm=self.algorithm,
            steps=len(self.steps),
            initial_top_simplices=self.initial_top_simplices,
            euler_constant=self.euler_constant,
            from_above=sum(s.side == "from_above" for s in self.steps),
            from_below=sum(s.side == "from_below" for s in self.steps),
            disagreements=sum(s.naive_agrees is False for s in self.steps),
            spot_check_failures=sum(s.spot_check is False for s in self.steps),
            terminal=self.terminal,
        )

    def frame(self) -> pd.DataFrame:
        """Steps as a table, one row per collapse."""
        return pd.DataFrame([s.model_dump() for s in self.steps])

    def to_json_lines(self) -> str:
        header = {
            "type": "header",
            "algorithm": self.algorithm,
            "initial_top_simplices": self.initial_top_simplices,
            "initial_euler": self.initial_euler,
        }
        lines = [json.dumps(header, sort_keys=True)]
        lines += [json.dumps({"type": "step", **s.model_dump()}, sort_keys=True) for s in self.steps]
        lines.append(json.dumps({"type": "summary", **self.summary().model_dump()}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json_lines(), encoding="utf-8")
        logger.info("Wrote trace with %d steps to %s", len(self.steps), path)
        return path

    @classmethod
    def read(cls, path: str | Path) -> "SquashTrace":
        """Inverse of ``write``."""
        header: dict = {}
        steps: list[CollapseStep] = []
        terminal = None
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            if not raw.strip():
                continue
            record = json.loads(raw)
            kind = record.pop("type")
            if kind == "header":
                header = record
            elif kind == "step":
                steps.append(CollapseStep(**record))
            elif kind == "summary" and record.get("terminal"):
                terminal = TerminalState(**record["terminal"])
        return cls(**header, steps=steps, terminal=terminal)
