"""
Exact-rational algebra over score ratios.

A monomial is a product of ratios r_i = f_i / f where f_i is the i-th spatial
derivative of the density. `RhoPolynomial` is a pointwise polynomial in the
ratios; `MomentExpr` is a linear combination of moments E_f[m] = ∫ f·m dy.
Both keep coefficients as `fractions.Fraction` and never store zeros.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, TypeVar, Union

from app.core.exceptions import InvalidInputError

Rational = Union[int, Fraction]

_FACTOR_RE = re.compile(r"^r(\d+)(?:\^(\d+))?$")
_MOMENT_RE = re.compile(r"^E\[(.*)\]$")


class MomentMonomial:
    """Product of ratios r_i^{a_i}; only exponents >= 1 are stored."""

    __slots__ = ("_exponents", "_hash")

    def __init__(self, exponents: Optional[Union[Mapping[int, int], Iterable[Tuple[int, int]]]] = None):
        items = exponents.items() if isinstance(exponents, Mapping) else (exponents or ())
        merged: Dict[int, int] = {}
        for index, power in items:
            if index < 1:
                raise InvalidInputError(f"ratio index must be >= 1, got {index}")
            if power < 0:
                raise InvalidInputError(f"exponent must be >= 0, got {power}")
            if power:
                merged[index] = merged.get(index, 0) + power
        self._exponents: Tuple[Tuple[int, int], ...] = tuple(sorted(merged.items()))
        self._hash = hash(self._exponents)

    @classmethod
    def one(cls) -> MomentMonomial:
        return cls()

    @classmethod
    def ratio(cls, index: int, power: int = 1) -> MomentMonomial:
        return cls({index: power})

    @property
    def exponents(self) -> Tuple[Tuple[int, int], ...]:
        return self._exponents

    def exponent(self, index: int) -> int:
        for i, a in self._exponents:
            if i == index:
                return a
        return 0

    @property
    def weight(self) -> int:
        return sum(i * a for i, a in self._exponents)

    @property
    def degree(self) -> int:
        return sum(a for _, a in self._exponents)

    @property
    def max_index(self) -> int:
        return self._exponents[-1][0] if self._exponents else 0

    @property
    def is_even(self) -> bool:
        return all(a % 2 == 0 for _, a in self._exponents)

    def order_key(self) -> Tuple[int, Tuple[int, ...]]:
        """Graded order: weight first, then exponents read from the highest index down."""
        w = self.weight
        exps = dict(self._exponents)
        return w, tuple(exps.get(i, 0) for i in range(w, 0, -1))

    def __mul__(self, other: MomentMonomial) -> MomentMonomial:
        merged = dict(self._exponents)
        for i, a in other._exponents:
            merged[i] = merged.get(i, 0) + a
        return MomentMonomial(merged)

    def __pow__(self, power: int) -> MomentMonomial:
        return MomentMonomial({i: a * power for i, a in self._exponents})

    def without(self, index: int) -> MomentMonomial:
        """Divide by one factor r_index (caller guarantees it is present)."""
        merged = dict(self._exponents)
        merged[index] -= 1
        return MomentMonomial(merged)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MomentMonomial) and self._exponents == other._exponents

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: MomentMonomial) -> bool:
        return self.order_key() < other.order_key()

    def __repr__(self) -> str:
        return f"MomentMonomial({self})"

    def __str__(self) -> str:
        if not self._exponents:
            return "1"
        return "*".join(f"r{i}" if a == 1 else f"r{i}^{a}" for i, a in self._exponents)

    def f_notation(self) -> str:
        """Integrand f·m written as f_i products over a power of f, e.g. f_1^8/f^7."""
        if not self._exponents:
            return "f"
        numerator = " ".join(f"f_{i}" if a == 1 else f"f_{i}^{a}" for i, a in self._exponents)
        power = self.degree - 1
        if power == 0:
            return numerator
        return f"{numerator}/f" if power == 1 else f"{numerator}/f^{power}"


C = TypeVar("C", bound="_Combination")


class _Combination:
    """Sparse map monomial -> Fraction with exact linear algebra."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[MomentMonomial, Rational]] = None):
        self._terms: Dict[MomentMonomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            c = Fraction(coeff)
            if c:
                self._terms[mono] = self._terms.get(mono, Fraction(0)) + c
                if not self._terms[mono]:
                    del self._terms[mono]

    @classmethod
    def zero(cls: type[C]) -> C:
        return cls()

    @classmethod
    def monomial(cls: type[C], mono: MomentMonomial, coeff: Rational = 1) -> C:
        return cls({mono: coeff})

    @property
    def terms(self) -> Dict[MomentMonomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[MomentMonomial, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda kv: kv[0].order_key(), reverse=True))

    def coefficient(self, mono: MomentMonomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def weights(self) -> List[int]:
        return sorted({m.weight for m in self._terms})

    @property
    def max_index(self) -> int:
        return max((m.max_index for m in self._terms), default=0)

    def homogeneous_parts(self: C) -> Dict[int, C]:
        parts: Dict[int, Dict[MomentMonomial, Fraction]] = {}
        for mono, coeff in self._terms.items():
            parts.setdefault(mono.weight, {})[mono] = coeff
        return {w: type(self)(t) for w, t in parts.items()}

    def l1_norm(self) -> Fraction:
        return sum((abs(c) for c in self._terms.values()), Fraction(0))

    def _combine(self: C, other: C, sign: int) -> C:
        if type(other) is not type(self):
            return NotImplemented
        merged = dict(self._terms)
        for mono, coeff in other._terms.items():
            merged[mono] = merged.get(mono, Fraction(0)) + sign * coeff
        return type(self)(merged)

    def __add__(self: C, other: C) -> C:
        return self._combine(other, 1)

    def __sub__(self: C, other: C) -> C:
        return self._combine(other, -1)

    def __neg__(self: C) -> C:
        return type(self)({m: -c for m, c in self._terms.items()})

    def scale(self: C, factor: Rational) -> C:
        factor = Fraction(factor)
        return type(self)({m: c * factor for m, c in self._terms.items()})

    def __rmul__(self: C, factor: Rational) -> C:
        if isinstance(factor, (int, Fraction)):
            return self.scale(factor)
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        return type(other) is type(self) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"

    @staticmethod
    def _format_coefficient(coeff: Fraction, body: str, first: bool) -> str:
        sign = "-" if coeff < 0 else ("" if first else "+")
        magnitude = abs(coeff)
        if body == "1":
            text = str(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{magnitude}*{body}"
        if first:
            return f"{sign}{text}"
        return f" {sign} {text}"


class RhoPolynomial(_Combination):
    """Pointwise polynomial in the ratios r_i."""

    __slots__ = ()

    def __mul__(self, other: RhoPolynomial) -> RhoPolynomial:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, RhoPolynomial):
            return NotImplemented
        product: Dict[MomentMonomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                key = m1 * m2
                product[key] = product.get(key, Fraction(0)) + c1 * c2
        return RhoPolynomial(product)

    def square(self) -> RhoPolynomial:
        return self * self

    def expectation(self) -> MomentExpr:
        return MomentExpr(self._terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return "".join(self._format_coefficient(c, str(m), i == 0) for i, (m, c) in enumerate(self.items()))

    def f_notation(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (mono, coeff) in enumerate(self.items()):
            body = "1" if not mono.exponents else _ratio_fraction(mono)
            parts.append(self._format_coefficient(coeff, body, i == 0))
        return "".join(parts)


class MomentExpr(_Combination):
    """Linear combination Σ c_m E_f[m]."""

    __slots__ = ()

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return "".join(self._format_coefficient(c, f"E[{m}]", i == 0) for i, (m, c) in enumerate(self.items()))

    def f_notation(self) -> str:
        """Render as an integral in f, f_i notation, e.g. `∫ -1/2*f_2^2/f + 1/6*f_1^4/f^3 dy`."""
        if not self._terms:
            return "0"
        body = "".join(
            self._format_coefficient(c, m.f_notation(), i == 0) for i, (m, c) in enumerate(self.items())
        )
        return f"∫ {body} dy"


def _ratio_fraction(mono: MomentMonomial) -> str:
    numerator = " ".join(f"f_{i}" if a == 1 else f"f_{i}^{a}" for i, a in mono.exponents)
    degree = mono.degree
    return f"{numerator}/f" if degree == 1 else f"{numerator}/f^{degree}"


def _split_terms(text: str) -> Iterator[Tuple[int, str]]:
    text = text.replace(" ", "")
    if not text:
        raise InvalidInputError("empty expression")
    depth = 0
    start = 0
    sign = 1
    if text[0] in "+-":
        sign = -1 if text[0] == "-" else 1
        start = 1
    for pos in range(start, len(text)):
        ch = text[pos]
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch in "+-" and depth == 0 and text[pos - 1] not in "*/^":
            yield sign, text[start:pos]
            sign = -1 if ch == "-" else 1
            start = pos + 1
    yield sign, text[start:]


def _parse_monomial(factors: Iterable[str]) -> MomentMonomial:
    exps: Dict[int, int] = {}
    for factor in factors:
        if factor == "1":
            continue
        match = _FACTOR_RE.match(factor)
        if not match:
            raise InvalidInputError(f"cannot parse factor '{factor}'")
        index = int(match.group(1))
        exps[index] = exps.get(index, 0) + int(match.group(2) or 1)
    return MomentMonomial(exps)


def _parse_term(body: str, allow_moment: bool, allow_bare: bool) -> Tuple[Fraction, MomentMonomial]:
    coeff = Fraction(1)
    factors: List[str] = []
    saw_moment = False
    for piece in body.split("*") if "E[" not in body else _split_moment_factors(body):
        if not piece:
            raise InvalidInputError(f"malformed term '{body}'")
        moment = _MOMENT_RE.match(piece)
        if moment:
            if not allow_moment or saw_moment:
                raise InvalidInputError(f"unexpected moment in '{body}'")
            saw_moment = True
            factors.extend(f for f in moment.group(1).split("*") if f)
        elif _FACTOR_RE.match(piece):
            factors.append(piece)
        else:
            try:
                coeff *= Fraction(piece)
            except (ValueError, ZeroDivisionError) as exc:
                raise InvalidInputError(f"cannot parse coefficient '{piece}'") from exc
    if allow_moment and not saw_moment and not allow_bare:
        raise InvalidInputError(f"term '{body}' is missing E[...]")
    return coeff, _parse_monomial(factors)


def _split_moment_factors(body: str) -> List[str]:
    head, _, rest = body.partition("E[")
    inner, _, tail = rest.partition("]")
    pieces = [p for p in head.split("*") if p]
    pieces.append(f"E[{inner}]")
    pieces.extend(p for p in tail.split("*") if p)
    return pieces


def parse_polynomial(text: str) -> RhoPolynomial:
    """Parse `r4 - 6/5*r1*r3 - 7/10*r2^2` style text."""
    terms: Dict[MomentMonomial, Fraction] = {}
    if text.strip() == "0":
        return RhoPolynomial()
    for sign, body in _split_terms(text):
        coeff, mono = _parse_term(body, allow_moment=False, allow_bare=True)
        terms[mono] = terms.get(mono, Fraction(0)) + sign * coeff
    return RhoPolynomial(terms)


def parse_moment_expr(text: str) -> MomentExpr:
    """Parse the canonical text form, e.g. `-1/2*E[r2^2] + 1/6*E[r1^4]`."""
    terms: Dict[MomentMonomial, Fraction] = {}
    if text.strip() == "0":
        return MomentExpr()
    for sign, body in _split_terms(text):
        coeff, mono = _parse_term(body, allow_moment=True, allow_bare=False)
        terms[mono] = terms.get(mono, Fraction(0)) + sign * coeff
    return MomentExpr(terms)
