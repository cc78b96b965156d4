import math
from fractions import Fraction
from typing import List, Optional, Sequence

from app.core.exceptions import InvalidInputError


def rationalize(x: float, max_denominator: int) -> Fraction:
    """Closest fraction to x with denominator <= max_denominator (continued-fraction convergents)."""
    if max_denominator < 1:
        raise InvalidInputError(f"max denominator must be >= 1, got {max_denominator}")
    if not math.isfinite(x):
        raise InvalidInputError(f"cannot rationalize non-finite value {x}")
    return Fraction(x).limit_denominator(max_denominator)


def solve_exact(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Solve A w = b over the rationals by Gauss-Jordan elimination.

    A is m x k with full column rank expected. Returns None when the system is
    inconsistent or the columns are dependent.
    """
    rows = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    m = len(rows)
    k = len(matrix[0]) if m else 0
    pivot_row = 0
    pivots = []
    for col in range(k):
        found = next((r for r in range(pivot_row, m) if rows[r][col] != 0), None)
        if found is None:
            return None
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        lead = rows[pivot_row][col]
        rows[pivot_row] = [v / lead for v in rows[pivot_row]]
        for r in range(m):
            if r != pivot_row and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
        pivots.append(pivot_row)
        pivot_row += 1
    if any(rows[r][-1] != 0 for r in range(pivot_row, m)):
        return None
    return [rows[p][-1] for p in pivots]
