from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Tuple

import numpy as np

from app.core.exceptions import InvalidInputError

GRID_MASS_TOLERANCE = 1e-6


class Component(NamedTuple):
    weight: float
    mean: float
    variance: float

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class GaussianMixture:
    """Finite mixture Σ λ_k N(μ_k, σ_k²); weights are normalized on construction."""

    components: Tuple[Component, ...]

    def __init__(self, components: Iterable[Tuple[float, float, float]]):
        parsed = tuple(Component(float(w), float(m), float(v)) for w, m, v in components)
        if not parsed:
            raise InvalidInputError("a mixture needs at least one component")
        for c in parsed:
            if not (c.weight > 0 and math.isfinite(c.weight)):
                raise InvalidInputError(f"component weight must be positive, got {c.weight}")
            if not (c.variance > 0 and math.isfinite(c.variance)):
                raise InvalidInputError(f"component variance must be positive, got {c.variance}")
            if not math.isfinite(c.mean):
                raise InvalidInputError(f"component mean must be finite, got {c.mean}")
        total = math.fsum(c.weight for c in parsed)
        object.__setattr__(
            self, "components", tuple(Component(c.weight / total, c.mean, c.variance) for c in parsed)
        )

    @classmethod
    def gaussian(cls, mean: float = 0.0, variance: float = 1.0) -> GaussianMixture:
        return cls([(1.0, mean, variance)])

    @classmethod
    def two_point(cls, weight: float, separation: float, variance: float = 1.0) -> GaussianMixture:
        """λ N(0, σ²) + (1-λ) N(d, σ²); the scan family."""
        if not 0 < weight <= 1:
            raise InvalidInputError(f"mixture weight must lie in (0, 1], got {weight}")
        if weight == 1 or separation == 0:
            return cls.gaussian(0.0, variance)
        return cls([(weight, 0.0, variance), (1 - weight, separation, variance)])

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.components])

    @property
    def variances(self) -> np.ndarray:
        return np.array([c.variance for c in self.components])

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.means))

    @property
    def variance(self) -> float:
        second = np.dot(self.weights, self.variances + self.means ** 2)
        return float(second - self.mean ** 2)

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Density sampled on a uniform grid origin + k·spacing; renormalized to unit trapezoid mass."""

    origin: float
    spacing: float
    values: np.ndarray

    def __init__(self, origin: float, spacing: float, values):
        if not (spacing > 0 and math.isfinite(spacing)):
            raise InvalidInputError(f"grid spacing must be positive, got {spacing}")
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size < 3:
            raise InvalidInputError("grid values must be a 1-d array with at least 3 samples")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("grid values must be finite")
        if np.any(arr < 0):
            raise InvalidInputError("grid values must be nonnegative")
        mass = np.trapz(arr, dx=spacing)
        if mass <= 0:
            raise InvalidInputError("grid has zero mass")
        arr = arr / mass
        arr.setflags(write=False)
        object.__setattr__(self, "origin", float(origin))
        object.__setattr__(self, "spacing", float(spacing))
        object.__setattr__(self, "values", arr)

    @property
    def y(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.values.size)

    @property
    def end(self) -> float:
        return self.origin + self.spacing * (self.values.size - 1)

    @property
    def mass(self) -> float:
        return float(np.trapz(self.values, dx=self.spacing))

    def __len__(self) -> int:
        return int(self.values.size)
