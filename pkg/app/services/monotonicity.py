"""
Derivative sign tables of Fisher information along heat flow, the
mixed-Gaussian complete-monotonicity scan and log-convexity checks.

d^n I/dt^n is always evaluated from the symbolic moment expression; finite
differences appear only as an optional cross-check column.
"""
import itertools
import logging
import math
from multiprocessing import Pool
from typing import Callable, List, Optional, Sequence, Tuple

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.models.density import GaussianMixture
from app.models.moment import MomentExpr
from app.schemas.monotonicity import (
    FlowReport,
    FlowRow,
    HeatmapCell,
    LogConvexityReport,
    MonotonicityClass,
    ReciprocalReport,
    ScanConfig,
    ScanReport,
    ScanRow,
    SignEntry,
    SignReport,
    Violation,
)
from app.schemas.quadrature import QuadratureConfig, QuadratureResult
from app.services import densities, functionals, sequences
from app.services.moment_calculus import fisher_derivative

logger = logging.getLogger(__name__)


def zero_band(fisher_value: float) -> float:
    return settings.ZERO_BAND * max(1.0, abs(fisher_value))


def sign_of(value: float, band: float) -> str:
    if abs(value) < band:
        return "0"
    return "+" if value > 0 else "-"


def expected_sign(order: int) -> str:
    return "+" if order % 2 == 0 else "-"


def fisher_derivative_exprs(max_order: int, cap: Optional[int] = None) -> List[MomentExpr]:
    return [fisher_derivative(n, cap) for n in range(max_order + 1)]


def richardson_derivative(func: Callable[[float], float], t: float, order: int,
                          step: Optional[float] = None, levels: Optional[int] = None) -> float:
    """n-th derivative by central differences at steps h, 2h, 4h, ... with Richardson extrapolation."""
    levels = settings.RICHARDSON_LEVELS if levels is None else levels
    step = settings.RICHARDSON_STEP_RATIO * t if step is None else step
    if order == 0:
        return func(t)
    if t - order / 2 * step * 2 ** (levels - 1) <= 0:
        raise InvalidInputError(f"finite-difference stencil for order {order} leaves t > 0 at t={t}")

    def central(h: float) -> float:
        total = 0.0
        for k in range(order + 1):
            total += (-1) ** k * math.comb(order, k) * func(t + (order / 2 - k) * h)
        return total / h ** order

    table = [central(step * 2 ** i) for i in range(levels)]
    for j in range(1, levels):
        factor = 4 ** j
        table = [(factor * table[i] - table[i + 1]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def _components(mixture: GaussianMixture) -> List[Tuple[float, float, float]]:
    return [(c.weight, c.mean, c.variance) for c in mixture.components]


def _derivative_values(mixture: GaussianMixture, t: float, exprs: Sequence[MomentExpr],
                       cfg: Optional[QuadratureConfig]) -> List[QuadratureResult]:
    return functionals.moment_eval_many(exprs, densities.evolve(mixture, t), cfg)


def _checked_exprs(exprs: Optional[Sequence[MomentExpr]], max_order: int) -> List[MomentExpr]:
    if exprs is None:
        return fisher_derivative_exprs(max_order)
    exprs = list(exprs)
    if len(exprs) < max_order + 1:
        raise InvalidInputError(f"need {max_order + 1} derivative expressions, got {len(exprs)}")
    return exprs[:max_order + 1]


def sign_table(mixture: GaussianMixture, t: float, max_order: int, cfg: Optional[QuadratureConfig] = None,
               cross_check: bool = False, exprs: Optional[Sequence[MomentExpr]] = None) -> SignReport:
    if t <= 0:
        raise InvalidInputError(f"sign table needs t > 0, got {t}")
    exprs = _checked_exprs(exprs, max_order)
    results = _derivative_values(mixture, t, exprs, cfg)
    band = zero_band(results[0].value)

    def fisher_at(s: float) -> float:
        return functionals.fisher(densities.evolve(mixture, s), cfg).value

    entries = []
    for n, result in enumerate(results):
        sign = sign_of(result.value, band)
        expected = expected_sign(n)
        entry = SignEntry(
            order=n, value=result.value, sign=sign, expected_sign=expected, relative=abs(result.value) / band,
            violation=result.converged and sign not in ("0", expected),
            converged=result.converged, cutoff_mass=result.cutoff_mass,
        )
        if cross_check:
            fd = richardson_derivative(fisher_at, t, n)
            entry.fd_value = fd
            entry.fd_relative_error = abs(fd - result.value) / max(abs(result.value), band)
        entries.append(entry)
    return SignReport(t=t, components=_components(mixture), zero_band=band, entries=entries)


def log_convexity_margins(values: Sequence[float], band: float):
    """Function margin I·I'' - I'^2, sequence margins and the g_i·g_{i+2} sign checks, with a tolerance."""
    if len(values) < 3:
        raise InvalidInputError("log-convexity needs derivatives up to order >= 2")
    g = list(values)
    function_margin = g[0] * g[2] - g[1] ** 2
    sequence_margins = [abs(g[n - 1]) * abs(g[n + 1]) - g[n] ** 2 for n in range(1, len(g) - 1)]
    consistent = [g[i] * g[i + 2] >= -band * band for i in range(len(g) - 2)]
    return function_margin, sequence_margins, consistent


def _log_convex_tolerance(values: Sequence[float]) -> float:
    scale = max((abs(a) * abs(b) for a, b in zip(values, values[2:])), default=0.0)
    scale = max(scale, max((v * v for v in values[1:-1]), default=0.0))
    return settings.ZERO_BAND * max(scale, 1e-300)


def log_convexity_check(mixture: GaussianMixture, t: float, max_order: int,
                        cfg: Optional[QuadratureConfig] = None) -> LogConvexityReport:
    if max_order < 2:
        raise InvalidInputError(f"log-convexity check needs max order >= 2, got {max_order}")
    report = sign_table(mixture, t, max_order, cfg)
    values = report.values
    tol = _log_convex_tolerance(values)
    function_margin, sequence_margins, consistent = log_convexity_margins(values, report.zero_band)
    return LogConvexityReport(
        t=t,
        derivatives=values,
        function_margin=function_margin,
        function_log_convex=function_margin >= -tol,
        sequence_margins=sequence_margins,
        sequence_log_convex=all(m >= -tol for m in sequence_margins),
        sign_consistent=consistent,
        tolerance=tol,
    )


def reciprocal_profile(values: Sequence) -> ReciprocalReport:
    """Log-convexity of a positive sequence against log-concavity of its reciprocals."""
    if any(v <= 0 for v in values):
        raise InvalidInputError("reciprocal profile needs strictly positive entries")
    return ReciprocalReport(
        sequence=sequences.sequence_profile(values),
        reciprocal=sequences.sequence_profile([1 / v for v in values]),
    )


def classify_monotonicity(values: Sequence[float], band: Optional[float] = None) -> MonotonicityClass:
    """AM if every derivative is >= 0, CM if they alternate starting nonnegative."""
    band = settings.ZERO_BAND if band is None else band
    signs = [sign_of(v, band) for v in values]
    am = all(s in ("+", "0") for s in signs)
    cm = all(s in (expected_sign(n), "0") for n, s in enumerate(signs))
    if am and cm:
        return MonotonicityClass.BOTH
    if am:
        return MonotonicityClass.ABSOLUTELY_MONOTONE
    if cm:
        return MonotonicityClass.COMPLETELY_MONOTONE
    return MonotonicityClass.NEITHER


def reflect_signs(values: Sequence[float]) -> List[float]:
    """Derivatives of f(-t) from those of f(t); swaps AM and CM."""
    return [(-1) ** n * v for n, v in enumerate(values)]


def _scan_cell(task):
    lam, d, times, exprs, qcfg, check_log_convexity, keep_rows = task
    mixture = GaussianMixture.two_point(lam, d)
    rows = []
    for t in times:
        results = _derivative_values(mixture, t, exprs, qcfg)
        rows.append((t, [r.value for r in results], all(r.converged for r in results)))
    return lam, d, rows, check_log_convexity, keep_rows


def _cell_findings(lam: float, d: float, rows, check_log_convexity: bool, keep_rows: bool = False):
    violations: List[Violation] = []
    kept: List[ScanRow] = []
    flagged = 0
    min_margin = math.inf
    for t, values, converged in rows:
        band = zero_band(values[0])
        if not converged:
            flagged += 1
            if keep_rows:
                kept.extend(ScanRow(lam=lam, d=d, t=t, order=n, value=value, sign=sign_of(value, band),
                                    flag="unconverged") for n, value in enumerate(values))
            continue
        for n, value in enumerate(values):
            margin = (-1) ** n * value
            min_margin = min(min_margin, margin / max(abs(values[0]), 1e-300))
            sign = sign_of(value, band)
            wrong = sign not in ("0", expected_sign(n))
            if wrong:
                violations.append(Violation(lam=lam, d=d, t=t, order=n, value=value, sign=sign))
            if keep_rows:
                kept.append(ScanRow(lam=lam, d=d, t=t, order=n, value=value, sign=sign,
                                    flag="sign" if wrong else "ok"))
        if check_log_convexity and len(values) >= 3:
            tol = _log_convex_tolerance(values)
            function_margin, sequence_margins, consistent = log_convexity_margins(values, band)
            if function_margin < -tol:
                violations.append(Violation(lam=lam, d=d, t=t, order=2, value=function_margin, sign="-",
                                            kind="log-convexity"))
            for n, m in enumerate(sequence_margins, start=1):
                if m < -tol:
                    violations.append(Violation(lam=lam, d=d, t=t, order=n, value=m, sign="-",
                                                kind="sequence-log-convexity"))
            for i, ok in enumerate(consistent):
                if not ok:
                    product = values[i] * values[i + 2]
                    violations.append(Violation(lam=lam, d=d, t=t, order=i, value=product,
                                                sign=sign_of(product, band * band), kind="sign-consistency"))
    return violations, flagged, min_margin, kept


def cm_scan(cfg: ScanConfig, exprs: Optional[Sequence[MomentExpr]] = None) -> ScanReport:
    """Sweep λN(0,1) + (1-λ)N(d,1) over the (λ, d, t) grid; cells are evaluated in parallel with cfg.jobs."""
    exprs = _checked_exprs(exprs, cfg.max_order)
    tasks = [
        (lam, d, cfg.times, exprs, cfg.quadrature, cfg.log_convexity, cfg.keep_rows)
        for lam, d in itertools.product(cfg.lambdas, cfg.separations)
    ]
    logger.info("scan: %d cells x %d times, orders 0..%d, %d job(s)",
                len(tasks), len(cfg.times), cfg.max_order, cfg.jobs)

    if cfg.jobs > 1:
        with Pool(cfg.jobs) as pool:
            cells = list(pool.imap(_scan_cell, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    else:
        cells = [_scan_cell(task) for task in tasks]

    violations: List[Violation] = []
    kept: List[ScanRow] = []
    heatmap: List[HeatmapCell] = []
    flagged = 0
    for done, (lam, d, rows, check_log_convexity, keep_rows) in enumerate(cells, start=1):
        cell_violations, cell_flagged, min_margin, cell_rows = _cell_findings(lam, d, rows, check_log_convexity,
                                                                              keep_rows)
        violations.extend(cell_violations)
        kept.extend(cell_rows)
        flagged += cell_flagged
        heatmap.append(HeatmapCell(lam=lam, d=d, min_margin=min_margin))
        if done % 50 == 0:
            logger.info("scan progress: %d/%d cells", done, len(cells))

    points = len(tasks) * len(cfg.times)
    logger.info("scan finished: %d points, %d violations, %d flagged", points, len(violations), flagged)
    if flagged:
        logger.warning("scan: %d point(s) not checked, quadrature did not converge", flagged)
    return ScanReport(
        lambdas=cfg.lambdas,
        separations=cfg.separations,
        times=cfg.times,
        max_order=cfg.max_order,
        points=points,
        sign_checks=points * (cfg.max_order + 1),
        flagged=flagged,
        violations=violations,
        heatmap=heatmap,
        rows=kept,
    )


def flow_curve(mixture: GaussianMixture, times: Sequence[float], max_order: int,
               cfg: Optional[QuadratureConfig] = None) -> FlowReport:
    """Rows (t, h, I, dI1..dIk) along the flow."""
    exprs = fisher_derivative_exprs(max_order)
    rows = []
    for t in times:
        if t < 0:
            raise InvalidInputError(f"flow times must be >= 0, got {t}")
        evolved = densities.evolve(mixture, t)
        h = functionals.entropy(evolved, cfg)
        results = functionals.moment_eval_many(exprs, evolved, cfg)
        rows.append(FlowRow(
            t=t, entropy=h.value, fisher=results[0].value,
            derivatives=[r.value for r in results[1:]],
            converged=h.converged and all(r.converged for r in results),
        ))
    return FlowReport(components=_components(mixture), max_order=max_order, rows=rows)
