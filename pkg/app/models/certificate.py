from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Tuple

from app.core.exceptions import CertificateValidationError
from app.models.moment import MomentExpr, MomentMonomial, RhoPolynomial


@dataclass(frozen=True)
class SOSCertificate:
    """sign · prefactor · (Σ c_j E[q_j²] + Σ d_l E[m_l]) claimed equal to d^n h/dt^n.

    Squares q_j are ratio polynomials of weight n; remainders m_l are
    monomials of weight 2n with even exponents, so every integrand is
    pointwise nonnegative before the sign is applied.
    """

    order: int
    sign: int
    squares: Tuple[Tuple[Fraction, RhoPolynomial], ...] = ()
    remainders: Tuple[Tuple[Fraction, MomentMonomial], ...] = ()
    prefactor: Fraction = Fraction(1)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefactor", Fraction(self.prefactor))
        object.__setattr__(self, "squares", tuple((Fraction(c), q) for c, q in self.squares))
        object.__setattr__(self, "remainders", tuple((Fraction(d), m) for d, m in self.remainders))

    @classmethod
    def build(
        cls,
        order: int,
        sign: int,
        squares: Iterable[Tuple[Fraction, RhoPolynomial]] = (),
        remainders: Iterable[Tuple[Fraction, MomentMonomial]] = (),
        prefactor=Fraction(1),
        name: str = "",
    ) -> SOSCertificate:
        cert = cls(order, sign, tuple(squares), tuple(remainders), Fraction(prefactor), name)
        cert.validate()
        return cert

    def validate(self) -> None:
        if self.order < 1:
            raise CertificateValidationError(f"certificate order must be >= 1, got {self.order}")
        if self.sign not in (1, -1):
            raise CertificateValidationError(f"sign must be +1 or -1, got {self.sign}")
        if self.prefactor <= 0:
            raise CertificateValidationError("prefactor must be positive", str(self.prefactor))
        for j, (coeff, poly) in enumerate(self.squares, start=1):
            if coeff < 0:
                raise CertificateValidationError(f"square {j} has a negative coefficient", f"{coeff}*({poly})^2")
            for mono in poly.terms:
                if mono.weight != self.order:
                    raise CertificateValidationError(
                        f"square {j} has a monomial of weight {mono.weight}, expected {self.order}", str(mono)
                    )
        for coeff, mono in self.remainders:
            if coeff < 0:
                raise CertificateValidationError("remainder has a negative coefficient", f"{coeff}*E[{mono}]")
            if not mono.is_even:
                raise CertificateValidationError("remainder monomial has an odd exponent", str(mono))
            if mono.weight != 2 * self.order:
                raise CertificateValidationError(
                    f"remainder has weight {mono.weight}, expected {2 * self.order}", str(mono)
                )

    def raw_expansion(self) -> MomentExpr:
        """The unreduced moment expression the certificate stands for."""
        total = MomentExpr()
        for coeff, poly in self.squares:
            total = total + poly.square().expectation().scale(coeff)
        for coeff, mono in self.remainders:
            total = total + MomentExpr.monomial(mono, coeff)
        return total.scale(self.sign * self.prefactor)
