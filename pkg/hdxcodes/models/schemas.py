"""
Pydantic Schemas

Validation and serialization schemas for run configuration, check reports and the
JSON documents written by the storage layer.
"""

import enum
import json
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hdxcodes.config import settings
from hdxcodes.services.algebra import is_prime

STOCHASTIC_COMMANDS = frozenset({"identities", "agree-local", "correct", "multcheck"})
# commands whose degrees live over F_p (--p) rather than the complex field F_q
LOCAL_FIELD_COMMANDS = frozenset({"agree-local", "localrate"})
COMMANDS = (
    "build",
    "stats",
    "code",
    "localrate",
    "identities",
    "agree-local",
    "correct",
    "multcheck",
    "report",
)


def to_builtin(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays and tuples into JSON-ready builtins."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, enum.Enum):
        return value.value
    return value


class CheckStatus(str, enum.Enum):
    """Outcome of one verification check."""

    PASS = "pass"
    FAIL = "fail"
    REPORT_ONLY = "report-only"
    VACUOUS = "vacuous"


class CheckRecord(BaseModel):
    """One named check with the statement it verifies and its measured values."""

    name: str
    anchor: str = Field(..., min_length=1)
    status: CheckStatus
    values: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("values", mode="before")
    @classmethod
    def convert_values(cls, v: Any) -> Any:
        return to_builtin(v)

    @classmethod
    def from_bool(
        cls, name: str, anchor: str, ok: bool, **values: Any
    ) -> "CheckRecord":
        status = CheckStatus.PASS if ok else CheckStatus.FAIL
        return cls(name=name, anchor=anchor, status=status, values=values)

    @classmethod
    def report(cls, name: str, anchor: str, **values: Any) -> "CheckRecord":
        return cls(name=name, anchor=anchor, status=CheckStatus.REPORT_ONLY, values=values)


class RunConfig(BaseModel):
    """Validated command-line configuration for one run."""

    model_config = ConfigDict(extra="forbid")

    command: Literal[
        "build",
        "stats",
        "code",
        "localrate",
        "identities",
        "agree-local",
        "correct",
        "multcheck",
        "report",
    ]
    q: int = 3
    n: int = Field(default=1, ge=1, le=4)
    phi: Union[Literal["auto"], List[int]] = "auto"
    degrees: Tuple[int, int, int] = (1, 1, 1)
    seed: Optional[int] = Field(default=None, ge=0)
    trials: int = Field(default=10, ge=1)
    corrupt: int = Field(default=1, ge=0)
    budget_group: Optional[int] = Field(default=None, ge=1)
    budget_rank: Optional[int] = Field(default=None, ge=1)
    budget_enum: Optional[int] = Field(default=None, ge=1)
    in_path: Optional[str] = None
    out_path: Optional[str] = None
    mode: Literal["restrict", "nearest"] = "nearest"
    p: Optional[int] = None
    dmax: Optional[int] = Field(default=None, ge=0)
    inputs: List[str] = Field(default_factory=list)

    @field_validator("q")
    @classmethod
    def validate_q(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError(f"q must be prime, got {v}")
        return v

    @field_validator("p")
    @classmethod
    def validate_p(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and not is_prime(v):
            raise ValueError(f"p must be prime, got {v}")
        return v

    @model_validator(mode="after")
    def validate_combination(self) -> "RunConfig":
        if isinstance(self.phi, list):
            if len(self.phi) != self.n + 1:
                raise ValueError(f"phi needs n+1 = {self.n + 1} coefficients, got {len(self.phi)}")
            if self.phi[-1] % self.q != 1:
                raise ValueError("phi must be monic (last coefficient 1)")
            if any(not 0 <= c < self.q for c in self.phi):
                raise ValueError(f"phi coefficients must lie in [0, {self.q})")
        field_size = self.p if self.command in LOCAL_FIELD_COMMANDS and self.p is not None else self.q
        if any(not 0 <= d < field_size for d in self.degrees):
            raise ValueError(f"degrees must lie in [0, {field_size}), got {self.degrees}")
        if self.command in STOCHASTIC_COMMANDS and self.seed is None:
            raise ValueError(f"--seed is required for '{self.command}'")
        if self.command == "localrate" and (self.p is None or self.dmax is None):
            raise ValueError("localrate needs --p and --dmax")
        return self


class Report(BaseModel):
    """Versioned JSON report of one command."""

    schema_version: str = Field(default_factory=lambda: settings.report_schema_version)
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    records: List[CheckRecord] = Field(default_factory=list)
    timing: Dict[str, float] = Field(default_factory=dict)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    def failed(self) -> List[CheckRecord]:
        return [r for r in self.records if r.status == CheckStatus.FAIL]

    def exit_code(self) -> int:
        """0 iff no record failed."""
        return 1 if self.failed() else 0

    def deterministic_dump(self) -> str:
        """Canonical JSON without timing fields; equal runs give equal bytes."""
        data = self.model_dump(mode="json", exclude={"timing"})
        return json.dumps(data, indent=2, sort_keys=True)

    def full_dump(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# File documents
# ---------------------------------------------------------------------------


class InstanceHeader(BaseModel):
    """JSON header of a stored complex; triangles live in the binary sidecar."""

    schema_version: str = Field(default_factory=lambda: settings.report_schema_version)
    q: int
    n: int
    phi: List[int]
    group_order: int
    counts: Dict[str, int]
    digits_per_triangle: int
    sidecar: str
    vertices: List[Tuple[int, int]] = Field(default_factory=list)
    edges: List[Tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_counts(self) -> "InstanceHeader":
        if self.digits_per_triangle != 9 * self.n:
            raise ValueError("digits_per_triangle must equal 9n")
        if self.vertices and len(self.vertices) != self.counts.get("vertices"):
            raise ValueError("vertex table does not match counts")
        if self.edges and len(self.edges) != self.counts.get("edges"):
            raise ValueError("edge table does not match counts")
        return self


class LocalCodeProvenance(BaseModel):
    formula_checked: bool
    method: str = "graded"


class LocalCodeDocument(BaseModel):
    p: int
    dx: int
    dy: int
    dim: int
    basis_eval: List[List[int]]
    provenance: LocalCodeProvenance


class LineExport(BaseModel):
    edge_id: int
    v0: List[int]
    dir: List[int]
    alpha_to_triangle: List[int]


class Corruption(BaseModel):
    rows: int = 0
    lines: int = 0


class DecodeRow(BaseModel):
    """One agreement-decoder experiment row."""

    model_config = ConfigDict(populate_by_name=True)

    p: int
    dx: int
    dy: int
    seed: int
    corruption: Corruption
    delta_cubed: float = Field(alias="deltaCubed")
    e: Optional[int]
    status: str
    line_disagreement: Optional[float] = Field(alias="lineDisagreement")
    hypothesis_holds: bool = Field(alias="hypothesisHolds")
    recovered: bool

    def row(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


class CorrectionRow(BaseModel):
    """One corruption/local-correction trial."""

    seed: int
    corrupted: int
    mode: str
    initial_alpha: float
    final_alpha: float
    steps: int
    sweeps: int
    outcome: str
    recovered: bool
    monotone: bool
    within_step_bound: bool
    changed_vertex_fraction: float
    proximity_bound: float
    bottom_fraction: float = 0.0
    distance_to_result: Optional[float] = None
