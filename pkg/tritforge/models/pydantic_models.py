import math
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FIDELITY_SLACK = 1e-12


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


# Verification reports
class EquivalenceReport(FrozenModel):
    equivalent: bool
    global_phase: float = Field(..., description="Common phase in radians")
    max_deviation: float = Field(..., ge=0)
    leakage_norm: float = Field(..., ge=0)
    tolerance: float = Field(..., gt=0)
    worst_input: Optional[str] = Field(None, description="Qubit basis input with the largest deviation")
    deviations: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_verdict(self):
        if self.equivalent and not (self.max_deviation < self.tolerance and self.leakage_norm < self.tolerance):
            raise ValueError("equivalent reports need deviation and leakage below tolerance")
        return self


class TauReport(FrozenModel):
    entry_id: str
    per_input: Dict[str, float]
    tau_max: float = Field(..., ge=0)

    @model_validator(mode="after")
    def check_max(self):
        if self.per_input and not math.isclose(self.tau_max, max(self.per_input.values()), abs_tol=1e-12):
            raise ValueError("tau_max must equal the largest per-input value")
        return self


class TruthRow(FrozenModel):
    input: str
    output: Optional[str] = None
    phase: Optional[float] = None
    superposed: bool = False


class CatalogListing(FrozenModel):
    id: str
    flags: List[str]
    expected_two_site_count: int
    complete: bool


class VerifyRecord(FrozenModel):
    """One line of `verify` output."""
    id: str
    check: Literal["toffoli", "incomplete"]
    toffoli_equivalent: bool
    matches_declared: bool
    status: Literal["PASS", "FAIL"]
    global_phase: float
    max_deviation: float
    leakage_norm: float


class TauRow(FrozenModel):
    id: str
    input: str
    tau: float
    tau_max: float


# QEC records
class ErrorModel(FrozenModel):
    mode: Literal["fixed_angles", "random_single", "random_independent"] = "fixed_angles"
    angles: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis_schedule: Literal["bit", "phase", "alternating"] = "bit"
    p_error: float = Field(default=0.0, ge=0, le=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    rotate_site: bool = False

    @field_validator("angles")
    @classmethod
    def angles_finite(cls, v):
        if not all(math.isfinite(a) for a in v):
            raise ValueError("error angles must be finite")
        return v

    def basis_for_cycle(self, cycle: int) -> Literal["bit", "phase"]:
        if self.axis_schedule == "alternating":
            return "bit" if cycle % 2 == 0 else "phase"
        return self.axis_schedule


class ResetChannel(FrozenModel):
    epsilon_reset: float = Field(default=0.0, ge=0, le=1, description="Probability of reset failure")
    duration_ns: float = Field(default=280.0, ge=0)


class CycleRecord(FrozenModel):
    cycle: int = Field(..., ge=0)
    basis: Literal["bit", "phase"]
    error_sites: List[int]
    theta: List[float]
    fidelity: float = Field(..., ge=0, le=1 + FIDELITY_SLACK)
    leakage_flag: bool


class FidelityReport(FrozenModel):
    cycles: int = Field(..., ge=1)
    per_cycle_fidelity: List[float]
    final_fidelity: float = Field(..., ge=0, le=1 + FIDELITY_SLACK)
    leakage_events: int = Field(..., ge=0)
    records: List[CycleRecord] = Field(default_factory=list)

    @field_validator("per_cycle_fidelity")
    @classmethod
    def fidelities_in_range(cls, v):
        for f in v:
            if not 0 <= f <= 1 + FIDELITY_SLACK:
                raise ValueError(f"fidelity {f} outside [0, 1]")
        return v

    @property
    def mean_fidelity(self) -> float:
        return sum(self.per_cycle_fidelity) / len(self.per_cycle_fidelity)

    @property
    def min_fidelity(self) -> float:
        return min(self.per_cycle_fidelity)


# Timing records
class TimingComponent(FrozenModel):
    name: str
    duration_ns: float = Field(..., ge=0)
    relevant: bool = True


class TimingBudget(FrozenModel):
    label: str
    components: List[TimingComponent]
    total_ns: float = Field(..., ge=0)
    overlap_note: str = ""
    cycle_multiplicity: Optional[int] = Field(None, ge=1)

    def component(self, name: str) -> TimingComponent:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    def relevant_sum(self) -> float:
        return sum(c.duration_ns for c in self.components if c.relevant)


# CLI run configuration
class RunConfig(BaseModel):
    subcommand: Literal["verify", "tau", "qec", "timing", "dump", "list"]
    ids: List[str] = Field(default_factory=list)
    output_format: Literal["table", "json", "csv"] = "table"
    out: Optional[str] = None
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    tolerance: Optional[float] = Field(None, gt=0, lt=1)

    # QEC parameters
    decomposition: str = "B3"
    cycles: int = Field(default=10, ge=1)
    psi: Tuple[float, float] = (0.6, 0.8)
    error_model: ErrorModel = Field(default_factory=ErrorModel)
    reset: ResetChannel = Field(default_factory=ResetChannel)
    eps_cnot: float = 0.0
    channel: bool = False

    @field_validator("psi")
    @classmethod
    def normalize_psi(cls, v):
        norm = math.hypot(*v)
        if not math.isfinite(norm) or norm == 0:
            raise ValueError("psi needs finite amplitudes that are not both zero")
        return (v[0] / norm, v[1] / norm)

    @model_validator(mode="after")
    def check_ids(self):
        # Imported here: the catalog module itself depends on these models
        from tritforge.utils.decomposition_catalog import CATALOG_IDS

        unknown = [i for i in self.ids if i not in CATALOG_IDS]
        if self.subcommand == "qec" and self.decomposition not in CATALOG_IDS:
            unknown.append(self.decomposition)
        if unknown:
            raise ValueError(f"unknown decomposition id(s): {', '.join(unknown)}")
        return self
