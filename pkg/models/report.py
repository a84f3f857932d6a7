from datetime import datetime
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from models.extended_real import ExtReal


def round_sig(value: float) -> float:
    """Round to 12 significant digits for JSON output"""
    if value is None or value != value or value in (float("inf"), float("-inf")):
        return value
    return float(f"{value:.12g}")


class ConnectionRecord(BaseModel):
    """Indices of one connecting trajectory"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    connection: str
    # one entry per cycle containing the connection, keyed by cycle tag
    c_index: Dict[str, ExtReal]
    n_index: ExtReal
    source: str
    caveats: List[str] = Field(default_factory=list)

    def max_c_index(self) -> ExtReal:
        return max(self.c_index.values())


class PasReport(BaseModel):
    """Predominant asymptotic stability of each cycle and of the network"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    cycles: Dict[str, bool]
    network: bool


class IndexReport(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    network: str
    regime: str
    derived: Dict[str, float]
    records: List[ConnectionRecord]
    pas: PasReport
    caveats: List[str] = Field(default_factory=list)

    @field_serializer("derived")
    def _round_derived(self, derived: Dict[str, float]):
        return {key: round_sig(value) for key, value in derived.items()}

    def record(self, connection: str) -> ConnectionRecord:
        for record in self.records:
            if record.connection == connection:
                return record
        raise KeyError(f"No connection {connection} in report")

    def n_index(self, connection: str) -> ExtReal:
        return self.record(connection).n_index

    def c_index(self, connection: str, cycle: str) -> ExtReal:
        return self.record(connection).c_index[cycle]


class SequenceReport(BaseModel):
    """Exponent sequences of the escape sets, one (lower, upper) pair each"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    sequences: Dict[str, List[float]]
    # n* per pair name where lower > 1 > upper, None when no crossing
    crossing: Dict[str, Optional[int]]
    monotone: Dict[str, bool]

    @field_serializer("sequences")
    def _round_sequences(self, sequences: Dict[str, List[float]]):
        return {key: [round_sig(v) for v in values] for key, values in sequences.items()}


class IndexEstimate(BaseModel):
    """Monte-Carlo estimate of one stability index"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    network: str
    connection: str
    level: str
    eps_grid: List[float]
    attracted_fraction: List[float]
    attracted: List[int]
    escaped: List[int]
    undecided: List[int]
    sigma_plus: ExtReal
    sigma_minus: ExtReal
    sigma: ExtReal
    stderr_plus: Optional[float] = None
    stderr_minus: Optional[float] = None
    samples: int
    seed: int

    @field_serializer("attracted_fraction")
    def _round_fractions(self, values: List[float]):
        return [round_sig(v) for v in values]


class VerificationRow(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    connection: str
    level: str
    analytic: ExtReal
    estimate: Optional[ExtReal] = None
    delta: Optional[float]
    passed: bool
    note: str = ""


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    network: str
    tolerance: float
    rows: List[VerificationRow]
    nu_comparison: Optional[Dict[str, float]] = None
    created_at: datetime = Field(default_factory=datetime.now)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)
