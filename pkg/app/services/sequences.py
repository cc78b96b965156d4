"""
Discrete counterparts: log-concave and log-convex sequences, chromatic
polynomials, binary entropy and Mrs. Gerber's Lemma grid checks.

Entropies here are in bits.
"""
import logging
import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect
from scipy.special import entr
from scipy.stats import entropy as scipy_entropy

from app.core.config import settings
from app.core.exceptions import InvalidInputError, OrderCapExceeded
from app.models.graph import Graph
from app.schemas.sequence import ConvexityReport, PConcavityReport, SequenceProfile

logger = logging.getLogger(__name__)

CONVEXITY_TOLERANCE = 1e-10
INVERSE_XTOL = 1e-14
INVERSE_MAXITER = 200

Number = Union[int, float, Fraction]
GridFunction = Union[Callable[[float], float], Sequence[float]]


def _is_exact(values: Sequence[Number]) -> bool:
    return all(isinstance(v, Rational) for v in values)


def sequence_profile(values: Sequence[Number]) -> SequenceProfile:
    """a_i^2 >= a_{i-1} a_{i+1} (log-concave) and <= (log-convex) at every interior i."""
    values = list(values)
    exact = _is_exact(values)
    margins = [values[i] ** 2 - values[i - 1] * values[i + 1] for i in range(1, len(values) - 1)]
    if exact:
        concave = all(m >= 0 for m in margins)
        convex = all(m <= 0 for m in margins)
        tol = 0.0
    else:
        tol = settings.ZERO_BAND
        scales = [max(values[i] ** 2, abs(values[i - 1] * values[i + 1]), 1e-300)
                  for i in range(1, len(values) - 1)]
        concave = all(m >= -tol * s for m, s in zip(margins, scales))
        convex = all(m <= tol * s for m, s in zip(margins, scales))
    return SequenceProfile(
        values=[float(v) for v in values],
        exact=exact,
        log_concave=concave,
        log_convex=convex,
        margins=[float(m) for m in margins],
        tolerance=tol,
    )


def chromatic_polynomial(graph: Graph, cap: Optional[int] = None) -> List[int]:
    """Coefficients of χ_G(q) by ascending power, via deletion-contraction."""
    cap = settings.CHROMATIC_EDGE_CAP if cap is None else cap
    if graph.edge_count > cap:
        raise OrderCapExceeded(graph.edge_count, cap, "edge count")
    memo: Dict[Tuple, List[int]] = {}
    coeffs = _chromatic(graph, memo)
    logger.debug("chromatic polynomial of %d vertices, %d edges: %d memo entries",
                 graph.vertex_count, graph.edge_count, len(memo))
    return coeffs


def _chromatic(graph: Graph, memo: Dict[Tuple, List[int]]) -> List[int]:
    key = graph.canonical_key()
    cached = memo.get(key)
    if cached is not None:
        return cached
    if not graph.edges:
        result = [0] * graph.vertex_count + [1]
    else:
        edge = max(graph.edges)
        deleted = _chromatic(graph.delete_edge(edge), memo)
        contracted = _chromatic(graph.contract_edge(edge), memo)
        result = [a - (contracted[i] if i < len(contracted) else 0) for i, a in enumerate(deleted)]
    memo[key] = result
    return result


def evaluate_polynomial(coeffs: Sequence[int], q: int) -> int:
    return sum(c * q ** k for k, c in enumerate(coeffs))


def _check_probability(p: float, what: str = "probability") -> None:
    if not (0.0 <= p <= 1.0):
        raise InvalidInputError(f"{what} must lie in [0, 1], got {p}")


def binary_entropy(p: float) -> float:
    """H(p) = -p log2 p - (1-p) log2 (1-p)."""
    _check_probability(p)
    return float((entr(p) + entr(1.0 - p)) / math.log(2))


def binary_entropy_inv(x: float) -> float:
    """The branch of H^{-1} with values in [0, 1/2]."""
    _check_probability(x, "entropy value")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 0.5
    return float(bisect(lambda p: binary_entropy(p) - x, 0.0, 0.5, xtol=INVERSE_XTOL, maxiter=INVERSE_MAXITER))


def binary_convolve(p: float, q: float) -> float:
    """p * q = p(1-q) + (1-p)q, the crossover probability of two cascaded binary channels."""
    _check_probability(p)
    _check_probability(q)
    return p * (1.0 - q) + (1.0 - p) * q


def discrete_entropy(probabilities: Sequence[float], base: float = 2) -> float:
    probs = np.asarray(probabilities, dtype=float)
    if probs.size == 0 or np.any(probs < 0) or not math.isclose(float(probs.sum()), 1.0, abs_tol=1e-9):
        raise InvalidInputError("probabilities must be nonnegative and sum to 1")
    return float(scipy_entropy(probs, base=base))


def _grid_values(g: GridFunction, x_grid: np.ndarray) -> np.ndarray:
    values = np.array([g(x) for x in x_grid] if callable(g) else g, dtype=float)
    if values.shape != x_grid.shape:
        raise InvalidInputError("g must provide one value per grid point")
    if np.any(values < 0) or np.any(values > 1):
        raise InvalidInputError("g must map the grid into [0, 1]")
    return values


def _as_grid(x_grid: Sequence[float]) -> np.ndarray:
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or xs.size < 3 or np.any(np.diff(xs) <= 0):
        raise InvalidInputError("x grid must be increasing with at least 3 points")
    return xs


def _mgl_curve(p: float, g_values: np.ndarray) -> np.ndarray:
    return np.array([binary_entropy(binary_convolve(p, q)) for q in g_values])


def mgl_scan(p: float, g: GridFunction, x_grid: Sequence[float],
             tolerance: float = CONVEXITY_TOLERANCE) -> ConvexityReport:
    """Smallest second difference of x -> H(p * g(x)) on the grid."""
    _check_probability(p)
    xs = _as_grid(x_grid)
    second = np.diff(_mgl_curve(p, _grid_values(g, xs)), n=2)
    k = int(np.argmin(second))
    return ConvexityReport(
        p=p, points=int(xs.size), min_second_difference=float(second[k]), argmin_x=float(xs[k + 1]),
        convex=bool(second[k] >= -tolerance), tolerance=tolerance,
    )


def gmgl_p_concavity(g: GridFunction, x_grid: Sequence[float], p_grid: Sequence[float],
                     tolerance: float = CONVEXITY_TOLERANCE) -> PConcavityReport:
    """Largest second p-difference of the x-second differences of H(p * g(x)); diagnostic only."""
    xs = _as_grid(x_grid)
    ps = _as_grid(p_grid)
    for p in ps:
        _check_probability(float(p))
    g_values = _grid_values(g, xs)
    surface = np.array([np.diff(_mgl_curve(float(p), g_values), n=2) for p in ps])
    curvature = np.diff(surface, n=2, axis=0)
    peak = float(curvature.max())
    return PConcavityReport(
        points=int(xs.size), p_points=int(ps.size), max_second_p_difference=peak,
        concave=peak <= tolerance, tolerance=tolerance,
    )
