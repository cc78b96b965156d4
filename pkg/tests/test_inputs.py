from fractions import Fraction

import pytest

from app.core.exceptions import InvalidInputError
from app.repositories import inputs
from app.utils.ranges import parse_range


class TestRanges:
    def test_inclusive_step_range(self):
        assert parse_range("0:0.5:0.1") == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]

    def test_log_range(self):
        values = parse_range("log:0.01:10:4")
        assert values == pytest.approx([0.01, 0.1, 1.0, 10.0])

    def test_list_and_single(self):
        assert parse_range("1, 2.5,4") == [1.0, 2.5, 4.0]
        assert parse_range("3") == [3.0]

    @pytest.mark.parametrize("text", ["1:0:0.1", "0:1:0", "log:0:1:3", "a,b", "1:2"])
    def test_invalid(self, text):
        with pytest.raises(InvalidInputError):
            parse_range(text)


class TestMixtureFiles:
    def test_parse_with_comments(self):
        mixture = inputs.parse_mixture("# two bumps\n0.5 0 1\n0.5, 3, 2  # right\n")
        assert len(mixture) == 2
        assert mixture.variances.tolist() == [1.0, 2.0]

    def test_wrong_column_count(self):
        with pytest.raises(InvalidInputError):
            inputs.parse_mixture("0.5 0\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInputError):
            inputs.load_mixture(tmp_path / "nope.txt")


class TestGridFiles:
    def test_header_is_skipped(self):
        grid = inputs.parse_grid_csv("y,f\n0,0\n0.5,1\n1,1\n1.5,0\n")
        assert grid.spacing == 0.5
        assert len(grid) == 4

    def test_uneven_spacing(self):
        with pytest.raises(InvalidInputError):
            inputs.parse_grid_csv("0,0\n0.5,1\n1.2,0\n")

    def test_measure_file(self, tmp_path):
        path = tmp_path / "measure.csv"
        path.write_text("x,density\n0,1\n1,0.5\n2,0.25\n", encoding="utf-8")
        measure = inputs.load_measure_csv(path, atoms=[(3.0, 0.1)])
        assert measure.x.tolist() == [0.0, 1.0, 2.0]
        assert measure.atoms == ((3.0, 0.1),)


class TestGraphAndSequence:
    def test_graph(self):
        graph = inputs.parse_graph("3\n0 1\n1 2  # chain\n")
        assert graph.vertex_count == 3
        assert graph.edges == frozenset({(0, 1), (1, 2)})

    def test_graph_bad_line(self):
        with pytest.raises(InvalidInputError):
            inputs.parse_graph("3\n0 1 2\n")

    def test_sequence_is_exact(self):
        assert inputs.parse_sequence("1, 1/2 0.25") == [Fraction(1), Fraction(1, 2), Fraction(1, 4)]

    def test_empty_sequence(self):
        with pytest.raises(InvalidInputError):
            inputs.parse_sequence("  ")
