import itertools
import math
from fractions import Fraction

import pytest

from app.core.exceptions import InvalidInputError, OrderCapExceeded
from app.models.graph import Graph
from app.services import sequences


def brute_force_colorings(graph: Graph, q: int) -> int:
    return sum(
        all(colors[u] != colors[v] for u, v in graph.edges)
        for colors in itertools.product(range(q), repeat=graph.vertex_count)
    )


class TestSequenceProfile:
    def test_binomial_row_is_log_concave(self):
        profile = sequences.sequence_profile([1, 4, 6, 4, 1])
        assert profile.exact
        assert profile.log_concave
        assert not profile.log_convex
        assert profile.margins == [10.0, 20.0, 10.0]

    def test_factorials_are_log_convex(self):
        profile = sequences.sequence_profile([1, 1, 2, 6, 24, 120])
        assert profile.log_convex
        assert not profile.log_concave

    def test_geometric_is_both(self):
        profile = sequences.sequence_profile([Fraction(1), Fraction(1, 2), Fraction(1, 4)])
        assert profile.log_concave and profile.log_convex

    def test_float_input_uses_tolerance(self):
        profile = sequences.sequence_profile([1.0, 0.1, 0.01 * (1 + 1e-13)])
        assert not profile.exact
        assert profile.log_concave and profile.log_convex

    def test_short_sequences_are_vacuous(self):
        profile = sequences.sequence_profile([3, 5])
        assert profile.margins == []
        assert profile.log_concave and profile.log_convex


class TestGraphs:
    def test_rejects_loops_and_duplicates(self):
        with pytest.raises(InvalidInputError):
            Graph(2, [(0, 0)])
        with pytest.raises(InvalidInputError):
            Graph(2, [(0, 1), (1, 0)])
        with pytest.raises(InvalidInputError):
            Graph(2, [(0, 2)])

    def test_contraction_merges_parallel_edges(self):
        contracted = Graph.complete(3).contract_edge((0, 1))
        assert contracted.vertex_count == 2
        assert contracted.edges == frozenset({(0, 1)})

    def test_constructors(self):
        assert Graph.complete(4).edge_count == 6
        assert Graph.path(4).edge_count == 3
        assert Graph.cycle(5).edge_count == 5


class TestChromatic:
    def test_triangle(self):
        assert sequences.chromatic_polynomial(Graph.complete(3)) == [0, 2, -3, 1]

    def test_path_on_three_vertices(self):
        assert sequences.chromatic_polynomial(Graph.path(3)) == [0, 1, -2, 1]

    def test_single_vertex(self):
        assert sequences.chromatic_polynomial(Graph(1)) == [0, 1]

    def test_edgeless(self):
        assert sequences.chromatic_polynomial(Graph(3)) == [0, 0, 0, 1]

    @pytest.mark.parametrize("graph", [
        Graph.cycle(4), Graph.cycle(5), Graph.complete(4), Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]),
    ])
    def test_matches_brute_force(self, graph):
        coeffs = sequences.chromatic_polynomial(graph)
        for q in range(5):
            assert sequences.evaluate_polynomial(coeffs, q) == brute_force_colorings(graph, q)

    def test_deletion_contraction_identity(self):
        graph = Graph.cycle(5)
        edge = (0, 1)
        whole = sequences.chromatic_polynomial(graph)
        deleted = sequences.chromatic_polynomial(graph.delete_edge(edge))
        contracted = sequences.chromatic_polynomial(graph.contract_edge(edge)) + [0]
        assert whole == [a - b for a, b in zip(deleted, contracted)]

    def test_cycle_closed_form(self):
        coeffs = sequences.chromatic_polynomial(Graph.cycle(6))
        for q in range(2, 6):
            assert sequences.evaluate_polynomial(coeffs, q) == (q - 1) ** 6 + (q - 1)

    def test_absolute_coefficients_are_log_concave(self):
        coeffs = sequences.chromatic_polynomial(Graph.complete(5))
        assert sequences.sequence_profile([abs(c) for c in coeffs if c]).log_concave

    def test_edge_cap(self):
        with pytest.raises(OrderCapExceeded):
            sequences.chromatic_polynomial(Graph.complete(5), cap=9)
        assert len(sequences.chromatic_polynomial(Graph.complete(5), cap=10)) == 6


class TestBinaryEntropy:
    def test_values(self):
        assert sequences.binary_entropy(0.5) == pytest.approx(1.0)
        assert sequences.binary_entropy(0.0) == 0.0
        assert sequences.binary_entropy(1.0) == 0.0
        assert sequences.binary_entropy(0.11) == pytest.approx(0.499916, abs=1e-5)

    def test_inverse(self):
        for p in (0.01, 0.11, 0.3, 0.49):
            assert sequences.binary_entropy_inv(sequences.binary_entropy(p)) == pytest.approx(p, abs=1e-12)
        assert sequences.binary_entropy_inv(0.0) == 0.0
        assert sequences.binary_entropy_inv(1.0) == 0.5

    def test_binary_convolution(self):
        assert sequences.binary_convolve(0.1, 0.2) == pytest.approx(0.26)
        assert sequences.binary_convolve(0.5, 0.3) == pytest.approx(0.5)

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            sequences.binary_entropy(1.5)
        with pytest.raises(InvalidInputError):
            sequences.binary_convolve(-0.1, 0.2)

    def test_discrete_entropy(self):
        assert sequences.discrete_entropy([0.25] * 4) == pytest.approx(2.0)
        assert sequences.discrete_entropy([0.5, 0.5], base=math.e) == pytest.approx(math.log(2))
        with pytest.raises(InvalidInputError):
            sequences.discrete_entropy([0.5, 0.6])


class TestGerber:
    X_GRID = [k / 400 for k in range(401)]

    @pytest.mark.parametrize("p", [0.0, 0.05, 0.1, 0.25, 0.4, 0.5])
    def test_inverse_entropy_curve_is_convex(self, p):
        report = sequences.mgl_scan(p, sequences.binary_entropy_inv, self.X_GRID)
        assert report.convex
        assert report.points == 401

    def test_non_convex_choice_is_detected(self):
        report = sequences.mgl_scan(0.1, lambda x: x * x, self.X_GRID)
        assert not report.convex
        assert report.min_second_difference < 0

    def test_precomputed_values(self):
        xs = [0.0, 0.5, 1.0]
        report = sequences.mgl_scan(0.2, [0.0, 0.1, 0.5], xs)
        assert report.points == 3

    def test_grid_validation(self):
        with pytest.raises(InvalidInputError):
            sequences.mgl_scan(0.1, sequences.binary_entropy_inv, [0.0, 0.5])
        with pytest.raises(InvalidInputError):
            sequences.mgl_scan(0.1, lambda x: 2.0, self.X_GRID)

    def test_p_concavity_diagnostic(self):
        report = sequences.gmgl_p_concavity(sequences.binary_entropy_inv, self.X_GRID[::4],
                                            [k / 20 for k in range(11)])
        assert report.points == 101
        assert report.p_points == 11
