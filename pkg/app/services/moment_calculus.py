"""
Symbolic time and space derivatives of moment functionals along heat flow.

The density of Y_t = X + Z_t obeys f_t = f_yy / 2, so every t-derivative of a
moment E_f[m] is again a combination of moments, two weight units higher.
Expressions are brought to a canonical form by eliminating integration-by-parts
identities E_f[(d/dy) m + r1·m] = 0, highest ratio index first.
"""
import logging
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, TypeVar

from app.core.config import settings
from app.core.exceptions import InvalidInputError, OrderCapExceeded
from app.models.moment import MomentExpr, MomentMonomial, RhoPolynomial, _Combination
from app.models.relation_basis import RelationBasis
from app.repositories.relation_basis import RelationBasisRepository, relation_bases

logger = logging.getLogger(__name__)

E = TypeVar("E", bound=_Combination)

HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def partitions(total: int, largest: Optional[int] = None) -> Tuple[Tuple[int, ...], ...]:
    """Integer partitions of `total`, parts in non-increasing order."""
    if largest is None:
        largest = total
    if total == 0:
        return ((),)
    out: List[Tuple[int, ...]] = []
    for part in range(min(total, largest), 0, -1):
        for rest in partitions(total - part, part):
            out.append((part,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_of_weight(weight: int) -> Tuple[MomentMonomial, ...]:
    """All monomials of the given weight, largest in the elimination order first."""
    if weight < 0:
        return ()
    monos = []
    for parts in partitions(weight):
        exps: Dict[int, int] = {}
        for p in parts:
            exps[p] = exps.get(p, 0) + 1
        monos.append(MomentMonomial(exps))
    return tuple(sorted(monos, key=MomentMonomial.order_key, reverse=True))


def _derive_y_monomial(mono: MomentMonomial) -> Dict[MomentMonomial, Fraction]:
    # (f_i/f)' = r_{i+1} - r_1 r_i
    out: Dict[MomentMonomial, Fraction] = {}
    for index, power in mono.exponents:
        key = mono.without(index) * MomentMonomial.ratio(index + 1)
        out[key] = out.get(key, Fraction(0)) + power
    if mono.degree:
        key = mono * MomentMonomial.ratio(1)
        out[key] = out.get(key, Fraction(0)) - mono.degree
    return out


def derive_y(expr: E) -> E:
    """Spatial derivative of the integrand polynomial (not of the moment)."""
    terms: Dict[MomentMonomial, Fraction] = {}
    for mono, coeff in expr.terms.items():
        for key, c in _derive_y_monomial(mono).items():
            terms[key] = terms.get(key, Fraction(0)) + coeff * c
    return type(expr)(terms)


def derive_t(expr: MomentExpr) -> MomentExpr:
    """d/dt of E_f[expr] along heat flow.

    d/dt ∫ f m = ∫ (f_2/2) m + f ∂_t m, with ∂_t r_i = (r_{i+2} - r_i r_2)/2.
    """
    terms: Dict[MomentMonomial, Fraction] = {}
    r2 = MomentMonomial.ratio(2)
    for mono, coeff in expr.terms.items():
        key = mono * r2
        terms[key] = terms.get(key, Fraction(0)) + coeff * HALF * (1 - mono.degree)
        for index, power in mono.exponents:
            key = mono.without(index) * MomentMonomial.ratio(index + 2)
            terms[key] = terms.get(key, Fraction(0)) + coeff * HALF * power
    return MomentExpr(terms)


def ibp_relation(mono: MomentMonomial) -> MomentExpr:
    """E_f[(d/dy) m + r1·m], which vanishes since ∫ (f·m)' dy = 0."""
    poly = RhoPolynomial.monomial(mono)
    return (derive_y(poly) + poly * RhoPolynomial.monomial(MomentMonomial.ratio(1))).expectation()


def build_relation_basis(weight: int) -> RelationBasis:
    relations = [ibp_relation(m) for m in monomials_of_weight(weight - 1)]
    table: Dict[MomentMonomial, Dict[MomentMonomial, Fraction]] = {}
    for relation in relations:
        row = dict(relation.terms)
        for lead, lead_row in table.items():
            c = row.get(lead)
            if c:
                for mono, v in lead_row.items():
                    row[mono] = row.get(mono, Fraction(0)) - c * v
                row = {m: v for m, v in row.items() if v}
        if not row:
            continue
        pivot = max(row, key=MomentMonomial.order_key)
        scale = row[pivot]
        row = {m: v / scale for m, v in row.items()}
        for lead, lead_row in table.items():
            c = lead_row.get(pivot)
            if c:
                for mono, v in row.items():
                    lead_row[mono] = lead_row.get(mono, Fraction(0)) - c * v
                table[lead] = {m: v for m, v in lead_row.items() if v}
        table[pivot] = row
    return RelationBasis(
        weight=weight,
        relations=relations,
        elimination_table={lead: MomentExpr(row) for lead, row in table.items()},
    )


def relation_basis(weight: int, repository: RelationBasisRepository = relation_bases) -> RelationBasis:
    return repository.get_or_create(weight, build_relation_basis)


def ibp_reduce(expr: MomentExpr, repository: RelationBasisRepository = relation_bases) -> MomentExpr:
    """Canonical normal form; each homogeneous part is reduced by its own basis."""
    result = MomentExpr()
    for weight, part in sorted(expr.homogeneous_parts().items()):
        result = result + relation_basis(weight, repository).reduce(part)
    return result


def normal_form_monomials(weight: int) -> List[MomentMonomial]:
    """Monomials of a weight that survive reduction (coordinates of canonical forms)."""
    leads = relation_basis(weight).elimination_table
    return [m for m in monomials_of_weight(weight) if m not in leads]


def _check_order(n: int, lowest: int, cap: int, what: str) -> None:
    if n < lowest:
        raise InvalidInputError(f"{what} must be >= {lowest}, got {n}")
    if n > cap:
        raise OrderCapExceeded(n, cap, what)


_derivative_cache: Dict[int, MomentExpr] = {}
_derivative_lock = threading.Lock()


def entropy_derivative(n: int, cap: Optional[int] = None) -> MomentExpr:
    """Canonical moment expression for d^n h(Y_t)/dt^n; weight 2n."""
    cap = settings.DERIVATIVE_CAP if cap is None else cap
    _check_order(n, 1, cap, "entropy derivative order")
    cached = _derivative_cache.get(n)
    if cached is not None:
        return cached
    with _derivative_lock:
        start = max((k for k in _derivative_cache if k < n), default=0)
        expr = _derivative_cache[start] if start else None
        for order in range(start + 1, n + 1):
            if expr is None:
                # de Bruijn: dh/dt = I/2
                expr = MomentExpr.monomial(MomentMonomial.ratio(1, 2), HALF)
            else:
                expr = ibp_reduce(derive_t(expr))
            _derivative_cache[order] = expr
            logger.info("entropy derivative %d: %d canonical terms", order, len(expr))
    return _derivative_cache[n]


def fisher_derivative(n: int, cap: Optional[int] = None) -> MomentExpr:
    """d^n I(Y_t)/dt^n; n=0 is Fisher information itself."""
    cap = settings.DERIVATIVE_CAP if cap is None else cap
    _check_order(n, 0, cap - 1, "Fisher derivative order")
    if n == 0:
        return MomentExpr.monomial(MomentMonomial.ratio(1, 2))
    return entropy_derivative(n + 1, cap).scale(2)


def render(expr: MomentExpr, notation: str = "ratio") -> str:
    if notation == "paper":
        return expr.f_notation()
    if notation == "ratio":
        return str(expr)
    raise InvalidInputError(f"unknown notation '{notation}' (expected ratio or paper)")
