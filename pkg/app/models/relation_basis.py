from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List

from app.models.moment import MomentExpr, MomentMonomial


@dataclass(frozen=True)
class RelationBasis:
    """Integration-by-parts identities of one weight, triangularized.

    `elimination_table` maps each leading monomial L to its row L + Σ c_k m_k,
    normalized so L has coefficient 1. Rows are fully reduced: no leading
    monomial appears in another row's support.
    """

    weight: int
    relations: List[MomentExpr]
    elimination_table: Dict[MomentMonomial, MomentExpr] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.elimination_table)

    def reduce(self, expr: MomentExpr) -> MomentExpr:
        """Normal form of a weight-homogeneous expression."""
        terms: Dict[MomentMonomial, Fraction] = {}
        for mono, coeff in expr.terms.items():
            row = self.elimination_table.get(mono)
            if row is None:
                terms[mono] = terms.get(mono, Fraction(0)) + coeff
                continue
            for other, c in row.terms.items():
                if other != mono:
                    terms[other] = terms.get(other, Fraction(0)) - coeff * c
        return MomentExpr(terms)
