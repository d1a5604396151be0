"""Scenario file models (strict JSON schema)."""

import json
from enum import Enum
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.config import settings
from app.errors import ScenarioParseError

Matrix = List[List[float]]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UpdateMode(str, Enum):
    BASELINE = "baseline"
    CONCURRENT_LEARNING = "concurrent_learning"


class CLSource(str, Enum):
    ORACLE = "oracle"
    RECONSTRUCTED = "reconstructed"


class Edge(StrictModel):
    """Undirected edge between 1-based vertex labels."""

    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)
    weight: float = Field(1.0, gt=0.0)


class GraphSection(StrictModel):
    n: Optional[int] = Field(None, ge=1)
    weights: Optional[Matrix] = None
    edges: Optional[List[Edge]] = None
    laplacian: Optional[Matrix] = None

    @model_validator(mode="after")
    def check_one_source(self):
        given = [k for k in ("weights", "edges", "laplacian") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one of weights, edges, laplacian is required (got {given or 'none'})")
        if self.edges is not None and self.n is None:
            raise ValueError("an edge list needs the vertex count n")
        return self


class PaperPhiSpec(StrictModel):
    kind: Literal["paper_phi"]
    gamma: List[float]
    beta: List[float]


class ZeroPhiSpec(StrictModel):
    kind: Literal["zero"]
    m: int = Field(1, ge=1)


class ConstantPhiSpec(StrictModel):
    kind: Literal["constant"]
    value: Matrix


RegressorSection = Annotated[
    Union[PaperPhiSpec, ZeroPhiSpec, ConstantPhiSpec], Field(discriminator="kind")
]


class DynamicsSection(StrictModel):
    A: Matrix
    B: Matrix
    regressor: RegressorSection


class ParametersSection(StrictModel):
    theta_true: Matrix
    theta_hat_init: Matrix
    x_init: Matrix
    alpha: Union[float, Literal["auto"]] = "auto"
    Q: Optional[Matrix] = None


class ControllerSection(StrictModel):
    update_mode: UpdateMode = UpdateMode.CONCURRENT_LEARNING
    cl_source: CLSource = CLSource.ORACLE
    r: int = Field(default_factory=lambda: settings.stack_capacity, ge=1)
    t_record: float = Field(default_factory=lambda: settings.t_record, ge=0.0)
    sigma: float = Field(0.0, ge=0.0)
    eps_add: float = Field(default_factory=lambda: settings.eps_add, ge=0.0)
    rank_tol: float = Field(default_factory=lambda: settings.rank_tol, ge=0.0)
    theorem_grade: bool = False


class IntegratorConfig(StrictModel):
    step_h: float = Field(1e-3, gt=0.0)
    t_final: float = Field(20.0, gt=0.0)
    sample_every: int = Field(10, ge=1)

    @model_validator(mode="after")
    def check_horizon(self):
        if self.t_final < self.step_h:
            raise ValueError("t_final must be at least one step")
        return self

    @property
    def n_steps(self) -> int:
        return int(self.t_final / self.step_h + 1e-9)

    @property
    def n_samples(self) -> int:
        return 1 + self.n_steps // self.sample_every


class ScenarioFile(StrictModel):
    name: str = "scenario"
    graph: GraphSection
    dynamics: DynamicsSection
    parameters: ParametersSection
    controller: ControllerSection = Field(default_factory=ControllerSection)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    seed: int = 0

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def parse_scenario(text: str, source: str = "<string>") -> ScenarioFile:
    """Parse scenario JSON, turning every failure into a ScenarioParseError."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(
            f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e

    try:
        return ScenarioFile.model_validate(raw)
    except ValidationError as e:
        problems = [
            f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        ]
        raise ScenarioParseError(f"{source}: scenario validation failed", problems) from e


def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read scenario {path}: {e}") from e
    return parse_scenario(text, source=str(path))
