"""
Sum-of-squares sign certificates for entropy derivatives.

Verification is exact: the certificate is expanded, reduced modulo the
integration-by-parts relations and compared with the canonical derivative.
Search runs projected gradient descent over square coefficients and remainder
weights in the canonical coordinates of weight 2n, checks feasibility with a
nonnegative least-squares fit of the current square directions, then rebuilds
the weights exactly over the rationals.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import nnls

from app.core.config import settings
from app.core.exceptions import OrderCapExceeded
from app.models.certificate import SOSCertificate
from app.models.moment import MomentExpr, MomentMonomial, RhoPolynomial
from app.repositories.certificates import format_certificate
from app.schemas.certificate import SearchConfig, SearchReport, VerifyReport
from app.services.moment_calculus import (
    entropy_derivative,
    ibp_reduce,
    monomials_of_weight,
    normal_form_monomials,
)
from app.utils.rationals import rationalize, solve_exact

logger = logging.getLogger(__name__)

# squares in the known identities for orders 2, 3, 4
KNOWN_SQUARE_COUNTS = {2: 1, 3: 1, 4: 3}

ACTIVE_WEIGHT = 1e-14


def target_sign(order: int) -> int:
    """Sign of d^n h/dt^n predicted by complete monotonicity of I: +, -, +, - for n = 1, 2, 3, 4."""
    return 1 if order % 2 else -1


def default_square_count(order: int) -> int:
    return KNOWN_SQUARE_COUNTS.get(order, max(order - 1, 1)) + 1


def expand_certificate(cert: SOSCertificate) -> MomentExpr:
    cert.validate()
    return ibp_reduce(cert.raw_expansion())


def verify_certificate(cert: SOSCertificate, cap: Optional[int] = None) -> VerifyReport:
    cap = settings.DERIVATIVE_CAP if cap is None else cap
    if cert.order > cap:
        raise OrderCapExceeded(cert.order, cap, "certificate order")
    residual = expand_certificate(cert) - entropy_derivative(cert.order, cap)
    verified = residual.is_zero()
    logger.info("certificate %s (order %d): %s", cert.name or "<unnamed>", cert.order,
                "verified" if verified else f"residual with {len(residual)} terms")
    return VerifyReport(
        order=cert.order,
        verified=verified,
        residual=str(residual),
        residual_norm_l1=str(residual.l1_norm()),
        residual_terms=len(residual),
        certificate=format_certificate(cert),
    )


@dataclass(frozen=True)
class _SearchProblem:
    order: int
    sign: int
    square_basis: Tuple[MomentMonomial, ...]
    remainder_basis: Tuple[MomentMonomial, ...]
    coordinates: Tuple[MomentMonomial, ...]
    gram: np.ndarray         # gram[a, b] = canonical E[m_a m_b]
    remainders: np.ndarray   # remainders[l] = canonical E[m_l]
    target: np.ndarray
    target_exact: Tuple[Fraction, ...]

    def exact_vector(self, expr: MomentExpr) -> List[Fraction]:
        terms = expr.terms
        return [terms.get(m, Fraction(0)) for m in self.coordinates]


@lru_cache(maxsize=None)
def _search_problem(order: int) -> _SearchProblem:
    sign = target_sign(order)
    square_basis = monomials_of_weight(order)
    remainder_basis = tuple(m for m in monomials_of_weight(2 * order) if m.is_even)
    coordinates = tuple(normal_form_monomials(2 * order))
    index = {m: k for k, m in enumerate(coordinates)}

    def vector(expr: MomentExpr) -> np.ndarray:
        out = np.zeros(len(coordinates))
        for mono, coeff in ibp_reduce(expr).terms.items():
            out[index[mono]] = float(coeff)
        return out

    p = len(square_basis)
    gram = np.zeros((p, p, len(coordinates)))
    for a in range(p):
        for b in range(a, p):
            gram[a, b] = gram[b, a] = vector(MomentExpr.monomial(square_basis[a] * square_basis[b]))
    remainders = np.array([vector(MomentExpr.monomial(m)) for m in remainder_basis]).reshape(-1, len(coordinates))
    target_expr = entropy_derivative(order).scale(sign)
    for arr in (gram, remainders):
        arr.setflags(write=False)
    problem = _SearchProblem(
        order=order,
        sign=sign,
        square_basis=square_basis,
        remainder_basis=remainder_basis,
        coordinates=coordinates,
        gram=gram,
        remainders=remainders,
        target=vector(target_expr),
        target_exact=tuple(target_expr.terms.get(m, Fraction(0)) for m in coordinates),
    )
    logger.info("search space for order %d: %d square monomials, %d remainders, %d coordinates",
                order, p, len(remainder_basis), len(coordinates))
    return problem


def _residual(problem: _SearchProblem, squares: np.ndarray, weights: np.ndarray) -> np.ndarray:
    quad = np.einsum("ja,jb,abk->k", squares, squares, problem.gram)
    return quad + weights @ problem.remainders - problem.target


def _loss_and_gradient(problem: _SearchProblem, squares: np.ndarray, weights: np.ndarray):
    res = _residual(problem, squares, weights)
    grad_squares = 4.0 * np.einsum("abk,jb,k->ja", problem.gram, squares, res)
    grad_weights = 2.0 * problem.remainders @ res
    return float(res @ res), grad_squares, grad_weights


def _columns(problem: _SearchProblem, squares: np.ndarray) -> np.ndarray:
    cols = [np.einsum("a,b,abk->k", q, q, problem.gram) for q in squares]
    cols.extend(problem.remainders)
    return np.column_stack(cols)


def _directions(squares: np.ndarray) -> np.ndarray:
    """Scale each square so its largest coefficient has magnitude one."""
    out = np.array(squares, dtype=float)
    for j, row in enumerate(out):
        peak = np.max(np.abs(row))
        if peak > 0:
            out[j] = row / row[np.argmax(np.abs(row))]
    return out


def _project(problem: _SearchProblem, squares: np.ndarray):
    """Best nonnegative weights for fixed square directions."""
    directions = _directions(squares)
    weights, rnorm = nnls(_columns(problem, directions), problem.target)
    return directions, weights, float(rnorm)


def _rational_square(problem: _SearchProblem, direction: np.ndarray, max_denominator: int) -> RhoPolynomial:
    return RhoPolynomial({
        mono: rationalize(float(c), max_denominator) for mono, c in zip(problem.square_basis, direction)
    })


def _pivot_columns(columns: np.ndarray, weights: np.ndarray, rank: int) -> List[int]:
    chosen: List[int] = []
    for idx in np.argsort(-weights, kind="stable"):
        trial = chosen + [int(idx)]
        if np.linalg.matrix_rank(columns[:, trial]) == len(trial):
            chosen = trial
        if len(chosen) == rank:
            break
    return chosen


def _refine(problem: _SearchProblem, directions: np.ndarray, max_denominator: int) -> Optional[SOSCertificate]:
    """Rationalize the square directions and solve exactly for nonnegative weights."""
    polys = [_rational_square(problem, d, max_denominator) for d in directions]
    polys = [q for q in polys if not q.is_zero()]
    exact_cols = [problem.exact_vector(ibp_reduce(q.square().expectation())) for q in polys]
    exact_cols += [problem.exact_vector(ibp_reduce(MomentExpr.monomial(m))) for m in problem.remainder_basis]
    float_cols = np.array([[float(v) for v in col] for col in exact_cols]).T
    guide, _ = nnls(float_cols, problem.target)

    r = len(problem.coordinates)
    pivots = _pivot_columns(float_cols, guide, r)
    free = [k for k in range(len(exact_cols)) if k not in pivots]
    weights: Dict[int, Fraction] = {
        k: rationalize(float(guide[k]), max_denominator) if guide[k] > ACTIVE_WEIGHT else Fraction(0) for k in free
    }
    rhs = list(problem.target_exact)
    for k, w in weights.items():
        if w:
            rhs = [v - w * c for v, c in zip(rhs, exact_cols[k])]
    matrix = [[exact_cols[k][row] for k in pivots] for row in range(r)]
    solution = solve_exact(matrix, rhs)
    if solution is None:
        return None
    weights.update(zip(pivots, solution))
    if any(w < 0 for w in weights.values()):
        return None

    k_squares = len(polys)
    squares = [(weights[k], polys[k]) for k in range(k_squares) if weights[k] > 0]
    remainders = [
        (weights[k_squares + l], m) for l, m in enumerate(problem.remainder_basis) if weights[k_squares + l] > 0
    ]
    return SOSCertificate.build(problem.order, problem.sign, squares, remainders, name=f"search-n{problem.order}")


def _exact_certificate(problem: _SearchProblem, directions: np.ndarray, cfg: SearchConfig):
    max_den = cfg.max_denominator
    while True:
        cert = _refine(problem, directions, max_den)
        if cert is not None:
            report = verify_certificate(cert)
            if report.verified:
                return cert, report, max_den
        if max_den * 2 > cfg.max_denominator_ceiling:
            return None, None, max_den
        logger.warning("exact refinement failed at max denominator %d; retrying with %d", max_den, max_den * 2)
        max_den *= 2


def _feasibility_check(problem: _SearchProblem, cfg: SearchConfig, squares: np.ndarray, loss: float,
                       iteration: int) -> Tuple[float, Optional[SearchReport]]:
    directions, _, rnorm = _project(problem, squares)
    logger.debug("order %d iteration %d: loss %.3e, projected residual %.3e", cfg.order, iteration, loss, rnorm)
    if rnorm >= cfg.residual_tolerance:
        return rnorm, None
    cert, report, max_den = _exact_certificate(problem, directions, cfg)
    if cert is None:
        logger.warning("order %d seed %d: feasible in floats but exact refinement failed",
                       cfg.order, cfg.random_seed)
        return rnorm, SearchReport(
            order=cfg.order, random_seed=cfg.random_seed, iterations=iteration, converged=True,
            float_residual=rnorm, verified=False, max_denominator_used=max_den,
        )
    logger.info("order %d seed %d: exact certificate after %d iterations", cfg.order, cfg.random_seed, iteration)
    return rnorm, SearchReport(
        order=cfg.order, random_seed=cfg.random_seed, iterations=iteration, converged=True,
        float_residual=rnorm, verified=True, max_denominator_used=max_den,
        certificate=format_certificate(cert), verify_report=report,
    )


def search_certificate(cfg: SearchConfig) -> SearchReport:
    """Look for a certificate of the predicted sign; deterministic for a fixed config."""
    problem = _search_problem(cfg.order)
    rng = np.random.default_rng(cfg.random_seed)
    k = cfg.squares or default_square_count(cfg.order)
    squares = rng.normal(scale=cfg.init_scale, size=(k, len(problem.square_basis)))
    weights = rng.uniform(0.0, 0.1, size=len(problem.remainder_basis))
    loss, grad_sq, grad_w = _loss_and_gradient(problem, squares, weights)
    best = float(np.sqrt(loss))

    iteration = 0
    while True:
        if iteration % cfg.check_every == 0 or iteration >= cfg.max_iterations:
            rnorm, report = _feasibility_check(problem, cfg, squares, loss, iteration)
            best = min(best, rnorm)
            if report is not None:
                return report
        if iteration >= cfg.max_iterations:
            break
        step = cfg.step_size
        moved = False
        while step >= cfg.min_step_size:
            trial_sq = squares - step * grad_sq
            trial_w = np.maximum(weights - step * grad_w, 0.0)
            trial_loss, trial_gsq, trial_gw = _loss_and_gradient(problem, trial_sq, trial_w)
            if trial_loss < loss:
                squares, weights = trial_sq, trial_w
                loss, grad_sq, grad_w = trial_loss, trial_gsq, trial_gw
                moved = True
                break
            step /= 2
        iteration += 1
        best = min(best, float(np.sqrt(loss)))
        if not moved:
            logger.debug("order %d: descent stalled at iteration %d", cfg.order, iteration)
            rnorm, report = _feasibility_check(problem, cfg, squares, loss, iteration)
            best = min(best, rnorm)
            if report is not None:
                return report
            break

    logger.info("order %d seed %d: no certificate after %d iterations (best residual %.3e)",
                cfg.order, cfg.random_seed, iteration, best)
    return SearchReport(
        order=cfg.order, random_seed=cfg.random_seed, iterations=iteration, converged=False, float_residual=best,
    )


def search_restarts(cfg: SearchConfig, restarts: int) -> List[SearchReport]:
    """Independent searches with seeds cfg.random_seed, cfg.random_seed + 1, ..."""
    reports = []
    for offset in range(restarts):
        run_cfg = cfg.model_copy(update={"random_seed": cfg.random_seed + offset})
        logger.info("search restart %d/%d (seed %d)", offset + 1, restarts, run_cfg.random_seed)
        reports.append(search_certificate(run_cfg))
    return reports
