import math
from fractions import Fraction

import pytest

from app.core.exceptions import InvalidInputError, OrderCapExceeded
from app.models.density import GaussianMixture
from app.models.moment import MomentExpr, MomentMonomial, RhoPolynomial, parse_moment_expr, parse_polynomial
from app.repositories.relation_basis import RelationBasisRepository
from app.services import functionals
from app.services.moment_calculus import (
    build_relation_basis,
    derive_t,
    derive_y,
    entropy_derivative,
    fisher_derivative,
    ibp_reduce,
    monomials_of_weight,
    normal_form_monomials,
    partitions,
    render,
)

r = MomentMonomial.ratio


def moment(text: str) -> MomentExpr:
    return parse_moment_expr(text)


class TestMonomials:
    def test_weight_and_degree(self):
        mono = MomentMonomial({1: 2, 3: 1})
        assert mono.weight == 5
        assert mono.degree == 3
        assert not mono.is_even
        assert str(mono) == "r1^2*r3"

    def test_zero_exponents_are_dropped(self):
        assert MomentMonomial({1: 0, 2: 1}) == r(2)

    def test_invalid_index(self):
        with pytest.raises(InvalidInputError):
            MomentMonomial({0: 1})

    def test_partitions_of_four(self):
        assert partitions(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))

    def test_monomials_of_weight_ordered_highest_index_first(self):
        assert [str(m) for m in monomials_of_weight(4)] == ["r4", "r1*r3", "r2^2", "r1^2*r2", "r1^4"]

    def test_f_notation(self):
        assert r(1, 8).f_notation() == "f_1^8/f^7"
        assert r(2).f_notation() == "f_2"


class TestCombinations:
    def test_zero_coefficients_never_stored(self):
        expr = moment("E[r1^2] - E[r1^2]")
        assert expr.is_zero()
        assert str(expr) == "0"

    def test_linearity(self):
        a = moment("E[r1^2]")
        b = moment("2*E[r2]")
        assert a + b - b == a
        assert (a + b).scale(3) == a.scale(3) + b.scale(3)

    def test_polynomial_square(self):
        q = parse_polynomial("r2 - r1^2")
        assert q.square() == parse_polynomial("r2^2 - 2*r1^2*r2 + r1^4")

    def test_text_form_parses_back(self):
        expr = moment("-1/2*E[r2^2] + 1/6*E[r1^4]")
        assert parse_moment_expr(str(expr)) == expr

    def test_parse_rejects_bare_monomial_in_moment_text(self):
        with pytest.raises(InvalidInputError):
            parse_moment_expr("r1^2")


class TestDerivatives:
    def test_derive_y_of_score(self):
        assert derive_y(moment("E[r1]")) == moment("E[r2] - E[r1^2]")

    def test_derive_y_of_constant_is_zero(self):
        assert derive_y(moment("E[1]")).is_zero()

    def test_derive_y_product_rule(self):
        assert derive_y(moment("E[r1^2]")) == moment("2*E[r1*r2] - 2*E[r1^3]")

    def test_derive_t_of_mass(self):
        assert derive_t(moment("E[1]")) == moment("1/2*E[r2]")

    def test_derive_t_of_fisher_integrand(self):
        assert derive_t(moment("E[r1^2]")) == moment("E[r1*r3] - 1/2*E[r1^2*r2]")

    def test_derive_t_raises_weight_by_two(self):
        expr = moment("E[r1^2*r2] + 3*E[r4]")
        assert derive_t(expr).weights == [6]


class TestReduction:
    def test_odd_top_ratio_moment_vanishes(self):
        assert ibp_reduce(moment("E[r3]")).is_zero()

    def test_mass_derivative_vanishes(self):
        assert ibp_reduce(moment("E[r2]")).is_zero()
        assert ibp_reduce(moment("E[r1]")).is_zero()

    def test_mixed_weight_four_term(self):
        assert ibp_reduce(moment("E[r1^2*r2]")) == moment("2/3*E[r1^4]")

    def test_weight_four_coordinates(self):
        assert [str(m) for m in normal_form_monomials(4)] == ["r2^2", "r1^4"]

    def test_idempotent(self):
        expr = moment("E[r1*r5] + E[r2*r4] - 3*E[r1^2*r2^2] + E[r6]")
        once = ibp_reduce(expr)
        assert ibp_reduce(once) == once

    def test_relations_reduce_to_zero(self):
        basis = build_relation_basis(6)
        for relation in basis.relations:
            assert basis.reduce(relation).is_zero()

    def test_private_repository_builds_its_own_basis(self):
        repo = RelationBasisRepository()
        assert ibp_reduce(moment("E[r1^2*r2]"), repo) == moment("2/3*E[r1^4]")
        assert repo.weights() == [4]
        assert repo.get(4).rank == len(monomials_of_weight(4)) - len(normal_form_monomials(4))
        repo.clear()
        assert repo.weights() == []

    def test_mixed_weights_reduce_separately(self):
        expr = moment("E[r1^2*r2] + E[r3]")
        assert ibp_reduce(expr) == moment("2/3*E[r1^4]")

    def test_relations_hold_numerically(self, skewed_mixture):
        basis = build_relation_basis(6)
        for relation in basis.relations[:6]:
            result = functionals.moment_eval(relation, skewed_mixture)
            scale = functionals.moment_eval(
                MomentExpr({m: abs(c) for m, c in relation.terms.items()}), skewed_mixture
            ).value
            assert abs(result.value) <= 1e-8 * max(1.0, abs(scale))


class TestEntropyDerivatives:
    def test_first_derivative_is_half_fisher(self):
        assert entropy_derivative(1) == moment("1/2*E[r1^2]")

    def test_second_derivative_canonical_text(self):
        assert str(entropy_derivative(2)) == "-1/2*E[r2^2] + 1/6*E[r1^4]"

    def test_second_derivative_matches_square_form(self):
        square = parse_polynomial("r2 - r1^2").square().expectation()
        assert entropy_derivative(2) == ibp_reduce(square).scale(Fraction(-1, 2))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_homogeneous_of_weight_2n(self, n):
        assert entropy_derivative(n).weights == [2 * n]

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_private_repository_gives_the_cached_form(self, n):
        repo = RelationBasisRepository()
        assert ibp_reduce(derive_t(entropy_derivative(n - 1)), repo) == entropy_derivative(n)
        assert repo.weights() == [2 * n]

    def test_fisher_derivatives(self):
        assert fisher_derivative(0) == moment("E[r1^2]")
        assert fisher_derivative(1) == entropy_derivative(2).scale(2)

    def test_order_cap(self):
        with pytest.raises(OrderCapExceeded) as exc_info:
            entropy_derivative(9)
        assert "8" in str(exc_info.value)

    def test_explicit_cap(self):
        with pytest.raises(OrderCapExceeded):
            entropy_derivative(3, cap=2)

    def test_order_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            entropy_derivative(0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    @pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
    def test_gaussian_closed_form(self, n, s):
        expected = 0.5 * (-1) ** (n - 1) * math.factorial(n - 1) / s ** n
        value = functionals.moment_eval(entropy_derivative(n), GaussianMixture.gaussian(0.0, s)).value
        assert value == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_fisher_gaussian_closed_form(self, n):
        s = 2.0
        expected = (-1) ** n * math.factorial(n) / s ** (n + 1)
        value = functionals.moment_eval(fisher_derivative(n), GaussianMixture.gaussian(1.0, s)).value
        assert value == pytest.approx(expected, rel=1e-8)


class TestRender:
    def test_ratio_notation(self):
        assert render(entropy_derivative(2)) == "-1/2*E[r2^2] + 1/6*E[r1^4]"

    def test_f_notation(self):
        assert render(entropy_derivative(2), "paper") == "∫ -1/2*f_2^2/f + 1/6*f_1^4/f^3 dy"

    def test_polynomial_f_notation(self):
        assert RhoPolynomial.monomial(r(1, 2)).f_notation() == "f_1^2/f^2"

    def test_unknown_notation(self):
        with pytest.raises(InvalidInputError):
            render(entropy_derivative(1), "latex")
