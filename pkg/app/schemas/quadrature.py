from pydantic import BaseModel, Field, field_validator
from typing import Optional

from app.core.config import settings


class QuadratureConfig(BaseModel):
    points_per_component: int = Field(default_factory=lambda: settings.QUADRATURE_POINTS, ge=16)
    tail_cutoff_ratio: float = Field(default_factory=lambda: settings.TAIL_CUTOFF_RATIO)
    relative_tolerance: float = Field(default_factory=lambda: settings.QUADRATURE_RELATIVE_TOLERANCE, gt=0)

    @field_validator('tail_cutoff_ratio')
    @classmethod
    def validate_tail_cutoff_ratio(cls, v):
        if not 0 < v < 1:
            raise ValueError('Tail cutoff ratio must lie strictly between 0 and 1')
        return v

    model_config = {"frozen": True}


class QuadratureResult(BaseModel):
    value: float
    converged: bool = True
    cutoff_mass: float = 0.0
    points: int = 0
    max_index: int = 0
    estimate_change: Optional[float] = None

    def __float__(self) -> float:
        return self.value
