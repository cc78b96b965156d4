from pydantic import BaseModel, Field, field_validator
from typing import Optional

from app.core.config import settings


class VerifyReport(BaseModel):
    order: int
    verified: bool
    residual: str = Field("0", description="Canonical form of expansion minus target")
    residual_norm_l1: str = Field("0", description="L1 norm of the residual coefficients, exact rational")
    residual_terms: int = 0
    certificate: Optional[str] = None


class SearchConfig(BaseModel):
    order: int = Field(..., ge=1)
    max_iterations: int = Field(default_factory=lambda: settings.SEARCH_MAX_ITERATIONS, ge=1)
    step_size: float = Field(default_factory=lambda: settings.SEARCH_STEP_SIZE, gt=0)
    min_step_size: float = Field(1e-14, gt=0)
    random_seed: int = 0
    max_denominator: int = Field(default_factory=lambda: settings.SEARCH_MAX_DENOMINATOR, ge=1)
    max_denominator_ceiling: int = Field(default_factory=lambda: settings.SEARCH_MAX_DENOMINATOR_CEILING, ge=1)
    residual_tolerance: float = Field(default_factory=lambda: settings.SEARCH_RESIDUAL_TOLERANCE, gt=0)
    squares: Optional[int] = Field(None, ge=1, description="Number of squares; default is the known layout plus one")
    check_every: int = Field(50, ge=1)
    init_scale: float = Field(0.5, gt=0)

    @field_validator('order')
    @classmethod
    def validate_order(cls, v):
        if v > settings.DERIVATIVE_CAP:
            raise ValueError(f'Order must not exceed the derivative cap {settings.DERIVATIVE_CAP}')
        return v


class SearchReport(BaseModel):
    order: int
    random_seed: int
    iterations: int
    converged: bool
    float_residual: float
    verified: bool = False
    max_denominator_used: Optional[int] = None
    certificate: Optional[str] = None
    verify_report: Optional[VerifyReport] = None
