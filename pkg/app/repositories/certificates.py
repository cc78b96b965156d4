"""
Certificate catalog and the plain-text certificate format.

    # comment
    order: 3
    sign: +1
    prefactor: 1/2
    square: 1 | r3 - r1*r2 + 1/3*r1^3
    remainder: 1/45 | r1^6

`builtin:<name>` references resolve against the catalog; anything else is a path.
"""
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from app.core.exceptions import CertificateValidationError, InvalidInputError
from app.models.certificate import SOSCertificate
from app.models.moment import MomentMonomial, RhoPolynomial, parse_polynomial

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"

_KNOWN_N2 = """\
order: 2
sign: -1
prefactor: 1/2
square: 1 | r2 - r1^2
"""

_KNOWN_N3 = """\
order: 3
sign: +1
prefactor: 1/2
square: 1 | r3 - r1*r2 + 1/3*r1^3
remainder: 1/45 | r1^6
"""

_KNOWN_N4 = """\
order: 4
sign: -1
prefactor: 1/2
square: 1 | r4 - 6/5*r1*r3 - 7/10*r2^2 + 8/5*r1^2*r2 - 1/2*r1^4
square: 1 | 2/5*r1*r3 - 1/3*r1^2*r2 + 9/100*r1^4
square: 1 | -4/100*r1^2*r2 + 4/100*r1^4
remainder: 1/300 | r2^4
remainder: 56/90000 | r1^4*r2^2
remainder: 13/70000 | r1^8
"""


def _parse_rational(text: str, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateValidationError(f"cannot parse {what}", text.strip()) from exc


def _parse_remainder(text: str) -> MomentMonomial:
    poly = parse_polynomial(text)
    terms = poly.terms
    if len(terms) != 1:
        raise CertificateValidationError("remainder must be a single monomial", text.strip())
    (mono, coeff), = terms.items()
    if coeff != 1:
        raise CertificateValidationError("remainder coefficient belongs before '|'", text.strip())
    return mono


def parse_certificate(text: str, name: str = "") -> SOSCertificate:
    order: Optional[int] = None
    sign: Optional[int] = None
    prefactor = Fraction(1)
    squares = []
    remainders = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise CertificateValidationError(f"line {lineno}: expected 'key: value'", raw.strip())
        key = key.strip().lower()
        if key == "order":
            order = int(_parse_rational(value, "order"))
        elif key == "sign":
            sign = int(_parse_rational(value, "sign"))
        elif key == "prefactor":
            prefactor = _parse_rational(value, "prefactor")
        elif key in ("square", "remainder"):
            coeff_text, bar, body = value.partition("|")
            if not bar:
                raise CertificateValidationError(f"line {lineno}: expected '<coefficient> | <body>'", raw.strip())
            coeff = _parse_rational(coeff_text, f"{key} coefficient")
            try:
                if key == "square":
                    squares.append((coeff, parse_polynomial(body)))
                else:
                    remainders.append((coeff, _parse_remainder(body)))
            except CertificateValidationError:
                raise
            except InvalidInputError as exc:
                raise CertificateValidationError(f"line {lineno}: {exc.detail}", body.strip()) from exc
        else:
            raise CertificateValidationError(f"line {lineno}: unknown key '{key}'")
    if order is None or sign is None:
        raise CertificateValidationError("certificate needs both 'order' and 'sign'")
    return SOSCertificate.build(order, sign, squares, remainders, prefactor, name)


def format_certificate(cert: SOSCertificate) -> str:
    lines = [f"order: {cert.order}", f"sign: {'+1' if cert.sign > 0 else '-1'}"]
    if cert.prefactor != 1:
        lines.append(f"prefactor: {cert.prefactor}")
    lines.extend(f"square: {c} | {q}" for c, q in cert.squares)
    lines.extend(f"remainder: {d} | {m}" for d, m in cert.remainders)
    return "\n".join(lines) + "\n"


def format_f_notation(cert: SOSCertificate) -> str:
    """One-line integral in f_i notation."""
    sign = "-" if cert.sign < 0 else ""
    parts: List[str] = []
    for c, q in cert.squares:
        body = f"f*({q.f_notation()})^2"
        parts.append(body if c == 1 else f"{c}*{body}")
    for d, m in cert.remainders:
        parts.append(f"{d}*{m.f_notation()}")
    if not parts:
        return "0"
    factor = "" if cert.prefactor == 1 else f"{cert.prefactor}*"
    return f"{sign}{factor}∫ [{' + '.join(parts)}] dy"


class CertificateRepository:
    """Named certificates shipped with the tool plus any registered at runtime."""

    def __init__(self):
        self._sources: Dict[str, str] = {
            "paper-n2": _KNOWN_N2,
            "paper-n3": _KNOWN_N3,
            "paper-n4": _KNOWN_N4,
        }

    def names(self) -> List[str]:
        return sorted(self._sources)

    def get(self, name: str) -> SOSCertificate:
        source = self._sources.get(name)
        if source is None:
            raise InvalidInputError(f"unknown builtin certificate '{name}' (available: {', '.join(self.names())})")
        return parse_certificate(source, name)

    def register(self, name: str, cert: SOSCertificate) -> None:
        self._sources[name] = format_certificate(cert)

    def load(self, reference: str) -> SOSCertificate:
        if reference.startswith(BUILTIN_PREFIX):
            return self.get(reference[len(BUILTIN_PREFIX):])
        path = Path(reference)
        if not path.is_file():
            raise InvalidInputError(f"certificate file not found: {reference}")
        logger.info("loading certificate from %s", path)
        return parse_certificate(path.read_text(encoding="utf-8"), path.stem)


certificates = CertificateRepository()
