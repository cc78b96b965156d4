"""
Numerical functionals of densities: entropy, Fisher information, moment
expressions, the sum-of-squares derivative integrands, EPI, capacity and forward
Laplace transforms.

Mixtures are integrated with per-component Gauss-Hermite rules (the integrands
are Gaussian-weighted functions of the ratios r_i); grids fall back to the
trapezoid rule with finite-difference derivatives. Points where
f < ε·max f are dropped and their mass is reported.
"""
import logging
import math
from functools import lru_cache, singledispatch
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.integrate import simpson

from app.core.exceptions import InvalidInputError
from app.models.density import DensityGrid, GaussianMixture
from app.models.laplace import LaplaceMeasure
from app.models.moment import MomentExpr, MomentMonomial
from app.schemas.quadrature import QuadratureConfig, QuadratureResult
from app.services import densities

logger = logging.getLogger(__name__)

Density = Union[GaussianMixture, DensityGrid]
# integrand(ratios, log_f) -> (values, absolute values) per point; ratios[i-1] = r_i
Integrand = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]

LAPLACE_TRUNCATION_RATIO = 1e-12


@lru_cache(maxsize=16)
def gauss_hermite(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E[g(Z)], Z ~ N(0, 1)."""
    knots, weights = hermegauss(n)
    weights = weights / math.sqrt(2 * math.pi)
    knots.setflags(write=False)
    weights.setflags(write=False)
    return knots, weights


def _mixture_nodes(mixture: GaussianMixture, n: int) -> Tuple[np.ndarray, np.ndarray]:
    knots, weights = gauss_hermite(n)
    ys = [c.mean + c.std * knots for c in mixture.components]
    ws = [c.weight * weights for c in mixture.components]
    return np.concatenate(ys), np.concatenate(ws)


def _ratios_on_mixture(
    mixture: GaussianMixture, n: int, max_index: int, cutoff: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    y, w = _mixture_nodes(mixture, n)
    scaled, log_scale = densities.scaled_pdf_derivatives(mixture, y, max_index)
    log_f = np.log(scaled[0]) + log_scale
    keep = log_f >= math.log(cutoff) + log_f.max()
    cut_mass = float(w[~keep].sum())
    ratios = scaled[1:, keep] / scaled[0, keep]
    return ratios, log_f[keep], w[keep], cut_mass


def _grid_derivatives(grid: DensityGrid, max_index: int) -> np.ndarray:
    rows = [np.asarray(grid.values)]
    for _ in range(max_index):
        rows.append(np.gradient(rows[-1], grid.spacing, edge_order=2))
    return np.array(rows)


def _ratios_on_grid(grid: DensityGrid, max_index: int, cutoff: float):
    derivs = _grid_derivatives(grid, max_index)
    f = derivs[0]
    keep = f > cutoff * f.max()
    w = np.full(f.size, grid.spacing)
    w[0] = w[-1] = 0.5 * grid.spacing
    cut_mass = float(np.dot(w[~keep], f[~keep]))
    ratios = derivs[1:, keep] / f[keep]
    return ratios, np.log(f[keep]), w[keep] * f[keep], cut_mass


@singledispatch
def _integrate(density, integrands: Sequence[Integrand], max_index: int, cfg: QuadratureConfig) -> List[QuadratureResult]:
    raise InvalidInputError(f"unsupported density type {type(density).__name__}")


@_integrate.register
def _(density: GaussianMixture, integrands, max_index, cfg):
    estimates = []
    for n in (cfg.points_per_component, 2 * cfg.points_per_component):
        ratios, log_f, w, cut_mass = _ratios_on_mixture(density, n, max_index, cfg.tail_cutoff_ratio)
        rows = []
        for integrand in integrands:
            values, magnitudes = integrand(ratios, log_f)
            rows.append((float(np.dot(w, values)), float(np.dot(w, magnitudes))))
        estimates.append((rows, cut_mass))
    (coarse, _), (fine, cut_mass) = estimates
    results = []
    for (v1, _), (v2, scale) in zip(coarse, fine):
        change = abs(v2 - v1)
        converged = change <= cfg.relative_tolerance * max(abs(v2), scale, 1e-300)
        if not converged:
            logger.debug("quadrature not converged: %g vs %g", v1, v2)
        results.append(QuadratureResult(
            value=v2, converged=converged, cutoff_mass=cut_mass,
            points=2 * cfg.points_per_component * len(density), max_index=max_index, estimate_change=change,
        ))
    return results


@_integrate.register
def _(density: DensityGrid, integrands, max_index, cfg):
    ratios, log_f, w, cut_mass = _ratios_on_grid(density, max_index, cfg.tail_cutoff_ratio)
    results = []
    for integrand in integrands:
        values, _ = integrand(ratios, log_f)
        results.append(QuadratureResult(
            value=float(np.dot(w, values)), converged=True, cutoff_mass=cut_mass,
            points=len(density), max_index=max_index,
        ))
    return results


def _monomial_values(ratios: np.ndarray, mono: MomentMonomial) -> np.ndarray:
    out = np.ones(ratios.shape[1])
    for index, power in mono.exponents:
        out = out * ratios[index - 1] ** power
    return out


def _moment_integrand(expr: MomentExpr) -> Integrand:
    terms = [(mono, float(coeff)) for mono, coeff in expr.terms.items()]

    def integrand(ratios, log_f):
        values = np.zeros(ratios.shape[1])
        magnitudes = np.zeros(ratios.shape[1])
        for mono, coeff in terms:
            m = _monomial_values(ratios, mono)
            values += coeff * m
            magnitudes += abs(coeff) * np.abs(m)
        return values, magnitudes

    return integrand


def _resolve(cfg: Optional[QuadratureConfig]) -> QuadratureConfig:
    return cfg if cfg is not None else QuadratureConfig()


def moment_eval_many(
    exprs: Sequence[MomentExpr], density: Density, cfg: Optional[QuadratureConfig] = None
) -> List[QuadratureResult]:
    """Evaluate Σ c_m E_f[m] for several expressions sharing one set of ratio samples."""
    max_index = max((e.max_index for e in exprs), default=0)
    return _integrate(density, [_moment_integrand(e) for e in exprs], max(max_index, 1), _resolve(cfg))


def moment_eval(expr: MomentExpr, density: Density, cfg: Optional[QuadratureConfig] = None) -> QuadratureResult:
    return moment_eval_many([expr], density, cfg)[0]


def _entropy_integrand(ratios, log_f):
    return -log_f, np.abs(log_f)


def entropy(density: Density, cfg: Optional[QuadratureConfig] = None) -> QuadratureResult:
    """Differential entropy h = -∫ f log f, in nats."""
    return _integrate(density, [_entropy_integrand], 1, _resolve(cfg))[0]


def fisher(density: Density, cfg: Optional[QuadratureConfig] = None) -> QuadratureResult:
    """I = ∫ f_1² / f."""
    return moment_eval(MomentExpr.monomial(MomentMonomial.ratio(1, 2)), density, cfg)


def _square_integrand(n: int) -> Integrand:
    def second(r):
        return -0.5 * (r[1] - r[0] ** 2) ** 2

    def third(r):
        square = r[2] - r[0] * r[1] + r[0] ** 3 / 3
        return 0.5 * (square ** 2 + r[0] ** 6 / 45)

    def fourth(r):
        r1, r2, r3, r4 = r[0], r[1], r[2], r[3]
        q1 = r4 - 6 / 5 * r1 * r3 - 7 / 10 * r2 ** 2 + 8 / 5 * r1 ** 2 * r2 - 0.5 * r1 ** 4
        q2 = 2 / 5 * r1 * r3 - 1 / 3 * r1 ** 2 * r2 + 9 / 100 * r1 ** 4
        q3 = -4 / 100 * r1 ** 2 * r2 + 4 / 100 * r1 ** 4
        rest = r2 ** 4 / 300 + 56 / 90000 * r1 ** 4 * r2 ** 2 + 13 / 70000 * r1 ** 8
        return -0.5 * (q1 ** 2 + q2 ** 2 + q3 ** 2 + rest)

    body = {2: second, 3: third, 4: fourth}[n]

    def integrand(ratios, log_f):
        values = body(ratios)
        return values, np.abs(values)

    return integrand


def square_form_derivative(n: int, density: Density, cfg: Optional[QuadratureConfig] = None) -> QuadratureResult:
    """d^n h/dt^n from the explicit sum-of-squares integrands, n in {2, 3, 4}."""
    if n not in (2, 3, 4):
        raise InvalidInputError(f"explicit integrands exist for orders 2, 3, 4; got {n}")
    return _integrate(density, [_square_integrand(n)], n, _resolve(cfg))[0]


def entropy_power(density: Density, cfg: Optional[QuadratureConfig] = None) -> float:
    return math.exp(2 * entropy(density, cfg).value)


def _as_grids(a: Density, b: Density) -> Tuple[DensityGrid, DensityGrid]:
    spacings = [
        d.spacing if isinstance(d, DensityGrid) else densities.grid_defaults(d)[0] for d in (a, b)
    ]
    grids = [d for d in (a, b) if isinstance(d, DensityGrid)]
    if len(grids) == 2:
        return a, b
    spacing = grids[0].spacing if grids else min(spacings)
    out = [d if isinstance(d, DensityGrid) else densities.sample_mixture(d, spacing=spacing) for d in (a, b)]
    return out[0], out[1]


def epi_gap(a: Density, b: Density, cfg: Optional[QuadratureConfig] = None) -> float:
    """e^{2h(A+B)} - e^{2h(A)} - e^{2h(B)} for independent A, B; nonnegative by Shannon's EPI."""
    if isinstance(a, GaussianMixture) and isinstance(b, GaussianMixture):
        total = densities.mixture_convolve(a, b)
    else:
        a, b = _as_grids(a, b)
        total = densities.convolve(a, b)
    return entropy_power(total, cfg) - entropy_power(a, cfg) - entropy_power(b, cfg)


def laplace_forward(measure: LaplaceMeasure, t: float) -> QuadratureResult:
    """∫ e^{-xt} dμ(x) over the sampled density plus point masses."""
    return laplace_derivatives(measure, t, 0)[0]


def laplace_derivatives(measure: LaplaceMeasure, t: float, max_order: int) -> List[QuadratureResult]:
    """n-th t-derivatives (-1)^n ∫ x^n e^{-xt} dμ(x), n = 0..max_order."""
    if t <= 0:
        raise InvalidInputError(f"Laplace transform needs t > 0, got {t}")
    if max_order < 0:
        raise InvalidInputError(f"order must be >= 0, got {max_order}")
    results = []
    for n in range(max_order + 1):
        value = 0.0
        converged = True
        tail = 0.0
        if measure.x.size:
            kernel = measure.x ** n * np.exp(-measure.x * t) * measure.density
            value = float(simpson(kernel, x=measure.x))
            tail = float(kernel[-1])
            peak = float(np.max(np.abs(kernel))) if kernel.size else 0.0
            converged = tail <= LAPLACE_TRUNCATION_RATIO * max(peak, 1e-300)
            if not converged:
                logger.warning("Laplace integrand not decayed at x=%g (last sample %g)", measure.x[-1], tail)
        value += sum(mass * loc ** n * math.exp(-loc * t) for loc, mass in measure.atoms)
        results.append(QuadratureResult(
            value=(-1) ** n * value, converged=converged, cutoff_mass=tail,
            points=int(measure.x.size), max_index=n,
        ))
    return results


def capacity(power: float, t: float) -> float:
    """Gaussian channel capacity (1/2) log(1 + P/t), nats per use."""
    if not (power > 0 and t > 0):
        raise InvalidInputError(f"capacity needs P > 0 and t > 0, got P={power}, t={t}")
    return 0.5 * math.log1p(power / t)

