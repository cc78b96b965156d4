import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import settings
from app.schemas.quadrature import QuadratureConfig
from app.schemas.sequence import SequenceProfile


class MonotonicityClass(str, Enum):
    ABSOLUTELY_MONOTONE = "AM"
    COMPLETELY_MONOTONE = "CM"
    BOTH = "both"
    NEITHER = "neither"


class SignEntry(BaseModel):
    order: int
    value: float
    sign: str = Field(..., description="'+', '-' or '0' inside the zero band")
    expected_sign: str
    relative: float = Field(..., description="|value| divided by the zero band")
    violation: bool = False
    converged: bool = True
    cutoff_mass: float = 0.0
    fd_value: Optional[float] = None
    fd_relative_error: Optional[float] = None


class SignReport(BaseModel):
    t: float
    components: List[Tuple[float, float, float]]
    zero_band: float
    entries: List[SignEntry]

    @property
    def values(self) -> List[float]:
        return [e.value for e in self.entries]

    @property
    def signs(self) -> List[str]:
        return [e.sign for e in self.entries]

    @property
    def violations(self) -> List[SignEntry]:
        return [e for e in self.entries if e.violation]

    @property
    def flagged(self) -> List[SignEntry]:
        return [e for e in self.entries if not e.converged]


def _default_lambdas() -> List[float]:
    return [round(0.05 * k, 10) for k in range(1, 11)]


def _default_separations() -> List[float]:
    return [round(0.5 * k, 10) for k in range(1, 41)]


def _default_times() -> List[float]:
    return [float(t) for t in np.logspace(-2, 1, 40)]


class ScanConfig(BaseModel):
    lambdas: List[float] = Field(default_factory=_default_lambdas)
    separations: List[float] = Field(default_factory=_default_separations)
    times: List[float] = Field(default_factory=_default_times)
    max_order: int = Field(7, ge=1)
    log_convexity: bool = True
    keep_rows: bool = Field(False, description="Record every (lambda, d, t, order) value, not only violations")
    jobs: int = Field(1, ge=1)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)

    @field_validator('lambdas')
    @classmethod
    def validate_lambdas(cls, v):
        if not v or any(not 0 < x < 1 for x in v):
            raise ValueError('Mixture weights must lie strictly between 0 and 1')
        return v

    @field_validator('separations')
    @classmethod
    def validate_separations(cls, v):
        if not v or any(not (x >= 0 and math.isfinite(x)) for x in v):
            raise ValueError('Separations must be finite and nonnegative')
        return v

    @field_validator('times')
    @classmethod
    def validate_times(cls, v):
        if not v or any(not (x > 0 and math.isfinite(x)) for x in v):
            raise ValueError('Times must be finite and positive')
        return v

    @model_validator(mode='after')
    def validate_order(self):
        if self.max_order > settings.DERIVATIVE_CAP - 1:
            raise ValueError(f'max_order must not exceed {settings.DERIVATIVE_CAP - 1}')
        return self


class Violation(BaseModel):
    lam: float = Field(..., alias="lambda")
    d: float
    t: float
    order: int
    value: float
    sign: str = Field(..., description="sign recorded at detection; margins below tolerance are '-'")
    kind: str = "sign"

    model_config = {"populate_by_name": True}


class ScanRow(BaseModel):
    lam: float = Field(..., alias="lambda")
    d: float
    t: float
    order: int
    value: float
    sign: str
    flag: str = Field(..., description="'ok', 'sign' or 'unconverged'")

    model_config = {"populate_by_name": True}


class HeatmapCell(BaseModel):
    lam: float = Field(..., alias="lambda")
    d: float
    min_margin: float

    model_config = {"populate_by_name": True}


class ScanReport(BaseModel):
    lambdas: List[float]
    separations: List[float]
    times: List[float]
    max_order: int
    points: int
    sign_checks: int
    flagged: int
    violations: List[Violation] = Field(default_factory=list)
    heatmap: List[HeatmapCell] = Field(default_factory=list)
    rows: List[ScanRow] = Field(default_factory=list)

    @property
    def sign_violations(self) -> List[Violation]:
        return [v for v in self.violations if v.kind == "sign"]

    @property
    def log_convexity_violations(self) -> List[Violation]:
        return [v for v in self.violations if v.kind != "sign"]


class LogConvexityReport(BaseModel):
    t: float
    derivatives: List[float]
    function_margin: float = Field(..., description="I*I'' - (I')^2")
    function_log_convex: bool
    sequence_margins: List[float] = Field(..., description="|g_{n-1}||g_{n+1}| - g_n^2, n = 1..max_order-1")
    sequence_log_convex: bool
    sign_consistent: List[bool] = Field(..., description="g_i * g_{i+2} >= 0")
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.function_log_convex and self.sequence_log_convex and all(self.sign_consistent)


class ReciprocalReport(BaseModel):
    sequence: SequenceProfile
    reciprocal: SequenceProfile

    @property
    def implication_holds(self) -> bool:
        return not self.sequence.log_convex or self.reciprocal.log_concave


class FlowRow(BaseModel):
    t: float
    entropy: float
    fisher: float
    derivatives: List[float]
    converged: bool = True


class FlowReport(BaseModel):
    components: List[Tuple[float, float, float]]
    max_order: int
    rows: List[FlowRow]
