from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from app.core.exceptions import InvalidInputError


@dataclass(frozen=True, eq=False)
class LaplaceMeasure:
    """A measure on [0, ∞): density samples on an increasing x grid plus point masses."""

    x: np.ndarray
    density: np.ndarray
    atoms: Tuple[Tuple[float, float], ...] = ()

    def __init__(self, x=None, density=None, atoms: Iterable[Tuple[float, float]] = ()):
        xs = np.asarray([] if x is None else x, dtype=float)
        ds = np.asarray([] if density is None else density, dtype=float)
        if xs.shape != ds.shape or xs.ndim != 1:
            raise InvalidInputError("measure grid and density samples must be 1-d arrays of equal length")
        if xs.size == 1 or (xs.size and (xs[0] < 0 or np.any(np.diff(xs) <= 0))):
            raise InvalidInputError("measure grid must be increasing, start at x >= 0 and hold at least 2 points")
        if np.any(ds < 0) or not np.all(np.isfinite(ds)):
            raise InvalidInputError("measure density must be finite and nonnegative")
        parsed = tuple((float(loc), float(mass)) for loc, mass in atoms)
        for loc, mass in parsed:
            if loc < 0 or mass < 0 or not (math.isfinite(loc) and math.isfinite(mass)):
                raise InvalidInputError(f"atom ({loc}, {mass}) must sit at x >= 0 with nonnegative mass")
        if not xs.size and not parsed:
            raise InvalidInputError("measure is empty")
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "density", ds)
        object.__setattr__(self, "atoms", parsed)

    @classmethod
    def exponential(cls, rate: float, x_max: float, points: int = 200001) -> LaplaceMeasure:
        """dμ = e^{-rate·x} dx sampled on [0, x_max]; its transform is 1/(t + rate)."""
        x = np.linspace(0.0, x_max, points)
        return cls(x, np.exp(-rate * x))

    @classmethod
    def point_mass(cls, location: float = 0.0, mass: float = 1.0) -> LaplaceMeasure:
        return cls(atoms=[(location, mass)])
