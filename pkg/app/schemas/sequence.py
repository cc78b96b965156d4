from pydantic import BaseModel, Field
from typing import List, Optional


class SequenceProfile(BaseModel):
    values: List[float]
    exact: bool = Field(False, description="True when the verdicts came from exact rational comparison")
    log_concave: bool
    log_convex: bool
    margins: List[float] = Field(default_factory=list, description="a_i^2 - a_{i-1} a_{i+1} for interior i")
    tolerance: float = 0.0

    @property
    def convex_margins(self) -> List[float]:
        return [-m for m in self.margins]


class ConvexityReport(BaseModel):
    p: float
    points: int
    min_second_difference: float
    argmin_x: Optional[float] = None
    convex: bool
    tolerance: float


class PConcavityReport(BaseModel):
    points: int
    p_points: int
    max_second_p_difference: float
    concave: bool
    tolerance: float
