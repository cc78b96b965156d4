"""
Densities evolved by the heat semigroup: Y_t = X + Z_t, Z_t ~ N(0, t).
"""
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.signal import fftconvolve

from app.core.config import settings
from app.core.exceptions import InvalidInputError, SupportError
from app.models.density import DensityGrid, GaussianMixture

logger = logging.getLogger(__name__)

POINTS_PER_STD = 40
HALF_WIDTH_STDS = 12.0
BOUNDARY_MASS_LIMIT = 1e-8

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def evolve(mixture: GaussianMixture, t: float) -> GaussianMixture:
    """Add independent N(0, t) noise: every component variance grows by t."""
    if t < 0:
        raise InvalidInputError(f"heat flow runs forward only; got t={t}")
    if t == 0:
        return mixture
    return GaussianMixture((c.weight, c.mean, c.variance + t) for c in mixture.components)


def mixture_convolve(a: GaussianMixture, b: GaussianMixture) -> GaussianMixture:
    """Density of X + Y for independent mixtures."""
    return GaussianMixture(
        (ca.weight * cb.weight, ca.mean + cb.mean, ca.variance + cb.variance)
        for ca in a.components
        for cb in b.components
    )


def scaled_pdf_derivatives(mixture: GaussianMixture, y: np.ndarray, max_order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Derivatives f_0..f_max_order at points y, all divided by a common exp(log_scale).

    Returns (scaled, log_scale) with f_i(y) = scaled[i] * exp(log_scale). Ratios f_i/f
    can be formed from `scaled` without underflow far in the tails.

    Uses d^i/dy^i N(μ,σ²) = (-1/σ)^i He_i((y-μ)/σ) N(μ,σ²) with probabilists' Hermite He_i.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    logs = []
    zs = []
    for c in mixture.components:
        sigma = c.std
        z = (y - c.mean) / sigma
        zs.append(z)
        logs.append(math.log(c.weight) - math.log(sigma) - LOG_SQRT_2PI - 0.5 * z * z)
    log_scale = np.max(logs, axis=0)

    scaled = np.zeros((max_order + 1, y.size))
    for c, z, log_n in zip(mixture.components, zs, logs):
        base = np.exp(log_n - log_scale)
        inv = -1.0 / c.std
        he_prev = np.ones_like(z)
        he = z.copy()
        scaled[0] += base
        factor = 1.0
        for i in range(1, max_order + 1):
            factor *= inv
            if i > 1:
                he_prev, he = he, z * he - (i - 1) * he_prev
            scaled[i] += factor * he * base
    return scaled, log_scale


def pdf_derivatives(mixture: GaussianMixture, y: Union[float, np.ndarray], max_order: int) -> np.ndarray:
    """f_0 .. f_max_order at y (row i holds f_i); a scalar y yields a 1-d array."""
    cap = 2 * settings.DERIVATIVE_CAP
    if max_order < 0 or max_order > cap:
        raise InvalidInputError(f"derivative order must lie in [0, {cap}], got {max_order}")
    scalar = np.ndim(y) == 0
    scaled, log_scale = scaled_pdf_derivatives(mixture, y, max_order)
    values = scaled * np.exp(log_scale)
    return values[:, 0] if scalar else values


def pdf(mixture: GaussianMixture, y: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    values = pdf_derivatives(mixture, y, 0)
    return float(values[0]) if np.ndim(y) == 0 else values[0]


def grid_defaults(mixture: GaussianMixture) -> Tuple[float, float]:
    """Spacing and half-width giving 40 points per smallest std and 12 std beyond the extreme means."""
    stds = np.sqrt(mixture.variances)
    return float(stds.min()) / POINTS_PER_STD, HALF_WIDTH_STDS * float(stds.max())


def sample_mixture(
    mixture: GaussianMixture, spacing: Optional[float] = None, half_width: Optional[float] = None
) -> DensityGrid:
    default_spacing, default_half = grid_defaults(mixture)
    spacing = default_spacing if spacing is None else spacing
    half_width = default_half if half_width is None else half_width
    lo = float(mixture.means.min()) - half_width
    hi = float(mixture.means.max()) + half_width
    count = int(math.ceil((hi - lo) / spacing)) + 1
    y = lo + spacing * np.arange(count)
    return DensityGrid(lo, spacing, pdf(mixture, y))


def boundary_mass(grid: DensityGrid) -> float:
    k = max(2, len(grid) // 100)
    v = grid.values
    return float(np.trapz(v[:k], dx=grid.spacing) + np.trapz(v[-k:], dx=grid.spacing))


def _gaussian_kernel(spacing: float, t: float) -> np.ndarray:
    half = int(math.ceil(HALF_WIDTH_STDS * math.sqrt(t) / spacing))
    x = spacing * np.arange(-half, half + 1)
    return np.exp(-x * x / (2 * t)) / math.sqrt(2 * math.pi * t) * spacing


def heat_evolve_grid(grid: DensityGrid, t: float) -> DensityGrid:
    """Convolve with a sampled N(0, t) kernel; the output support grows by the kernel's."""
    if t <= 0:
        raise InvalidInputError(f"grid heat flow needs t > 0, got {t}")
    width = grid.end - grid.origin
    kernel_width = 2 * HALF_WIDTH_STDS * math.sqrt(t)
    if kernel_width > width:
        raise SupportError(
            f"kernel width {kernel_width:.4g} exceeds grid width {width:.4g}",
            hint=f"extend the grid by at least {(kernel_width - width) / 2:.4g} on each side",
        )
    edge = boundary_mass(grid)
    if edge > BOUNDARY_MASS_LIMIT:
        raise SupportError(
            f"boundary mass {edge:.3g} exceeds {BOUNDARY_MASS_LIMIT:g}",
            hint="widen the grid so the density has decayed at both ends",
        )
    kernel = _gaussian_kernel(grid.spacing, t)
    values = np.clip(fftconvolve(grid.values, kernel), 0.0, None)
    origin = grid.origin - grid.spacing * (kernel.size // 2)
    logger.debug("heat_evolve_grid t=%g: %d -> %d samples", t, len(grid), values.size)
    return DensityGrid(origin, grid.spacing, values)


def convolve(a: DensityGrid, b: DensityGrid) -> DensityGrid:
    """Density of X + Y from two grids with equal spacing."""
    if not math.isclose(a.spacing, b.spacing, rel_tol=1e-12):
        raise InvalidInputError(f"grid spacings differ ({a.spacing} vs {b.spacing}); resample first")
    values = np.clip(fftconvolve(a.values, b.values) * a.spacing, 0.0, None)
    return DensityGrid(a.origin + b.origin, a.spacing, values)
