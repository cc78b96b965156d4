import json

import pytest

from app.main import cli

QUIET = ["--log-level", "ERROR"]


def invoke(runner, *args):
    return runner.invoke(cli, [*QUIET, *args])


class TestSymbolic:
    def test_derive(self, runner):
        result = invoke(runner, "derive", "--order", "2")
        assert result.exit_code == 0
        assert result.output.strip() == "-1/2*E[r2^2] + 1/6*E[r1^4]"

    def test_derive_f_notation(self, runner):
        result = invoke(runner, "derive", "--order", "2", "--notation", "paper")
        assert "f_2^2/f" in result.output

    def test_derive_above_cap(self, runner):
        result = invoke(runner, "derive", "--order", "9")
        assert result.exit_code == 2
        assert "cap" in result.output

    def test_certify_builtin(self, runner):
        result = invoke(runner, "certify", "--order", "4", "--certificate", "builtin:paper-n4")
        assert result.exit_code == 0
        assert "verified: true" in result.output

    def test_certify_defaults_to_builtin(self, runner):
        result = invoke(runner, "certify", "--order", "3", "--notation", "paper")
        assert result.exit_code == 0
        assert "certificate: 1/2*∫" in result.output

    def test_certify_failure_exits_3(self, runner, tmp_path):
        path = tmp_path / "bad.cert"
        path.write_text("order: 2\nsign: -1\nsquare: 1 | r2 - r1^2\n", encoding="utf-8")
        result = invoke(runner, "certify", "--certificate", str(path))
        assert result.exit_code == 3
        assert "verified: false" in result.output

    def test_certify_malformed_exits_2(self, runner, tmp_path):
        path = tmp_path / "bad.cert"
        path.write_text("order: 2\nsign: -1\nsquare: -1 | r2 - r1^2\n", encoding="utf-8")
        assert invoke(runner, "certify", "--certificate", str(path)).exit_code == 2

    def test_certify_json_is_reproducible(self, runner):
        args = ("certify", "--order", "2", "--format", "json", "--no-timestamp")
        first = invoke(runner, *args)
        second = invoke(runner, *args)
        assert first.output == second.output
        data = json.loads(first.output)
        assert data["kind"] == "certify"
        assert data["report"]["verified"] is True

    def test_search_order_two(self, runner):
        result = invoke(runner, "search", "--order", "2", "--restarts", "2", "--max-iterations", "300")
        assert result.exit_code == 0
        assert "restarts produced an exact certificate" in result.output

    def test_search_invalid_order(self, runner):
        assert invoke(runner, "search", "--order", "0").exit_code == 2


class TestFlow:
    def test_flow_table(self, runner):
        result = invoke(runner, "flow", "--t", "1", "--max-order", "2", "--signs")
        assert result.exit_code == 0
        assert "t=1: + - +" in result.output

    def test_flow_csv_to_directory(self, runner, tmp_path):
        result = invoke(runner, "flow", "--component", "0.5", "0", "1", "--component", "0.5", "3", "1",
                        "--t", "0.5,1", "--format", "csv", "--out-dir", str(tmp_path))
        assert result.exit_code == 0
        lines = (tmp_path / "flow.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("t,h,I")
        assert len(lines) == 3

    def test_flow_plot_data(self, runner, tmp_path):
        result = invoke(runner, "flow", "--t", "1", "--plot", "--out-dir", str(tmp_path))
        assert result.exit_code == 0
        assert any(p.name.startswith("flow-") for p in tmp_path.iterdir())

    def test_mixture_file(self, runner, tmp_path):
        path = tmp_path / "mix.txt"
        path.write_text("0.3 0 1\n0.7 4 0.5\n", encoding="utf-8")
        result = invoke(runner, "logconvex", "--mixture", str(path), "--t", "0.5")
        assert result.exit_code == 0
        assert "ok" in result.output

    def test_bad_mixture_exits_2(self, runner):
        assert invoke(runner, "flow", "--component", "0", "0", "1").exit_code == 2

    def test_small_scan(self, runner):
        result = invoke(runner, "scan", "--lambda", "0.25", "--d", "1,4", "--t", "0.5,2", "--max-order", "3")
        assert result.exit_code == 0
        assert "points: 4" in result.output
        assert "sign violations: 0" in result.output

    def test_scan_all_rows(self, runner):
        result = invoke(runner, "scan", "--lambda", "0.25", "--d", "4", "--t", "0.5,2", "--max-order", "3",
                        "--all-rows", "--format", "csv")
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "lambda,d,t,order,value,sign,flag"
        assert len(lines) == 1 + 2 * 4
        assert all(line.endswith(",ok") for line in lines[1:])

    def test_scan_rejects_order_above_cap(self, runner):
        assert invoke(runner, "scan", "--lambda", "0.25", "--d", "1", "--t", "1", "--max-order", "8").exit_code == 2


class TestInformation:
    def test_epi_gaussians(self, runner):
        result = invoke(runner, "epi", "--a-component", "1", "0", "1", "--b-component", "1", "0", "2")
        assert result.exit_code == 0
        assert result.output.startswith("epi gap:")

    def test_capacity(self, runner):
        result = invoke(runner, "capacity", "--power", "3", "--t", "1")
        assert result.exit_code == 0
        assert "0.69314718056" in result.output

    def test_laplace(self, runner):
        result = invoke(runner, "laplace", "--rate", "1", "--t", "1", "--max-order", "1")
        assert result.exit_code == 0
        assert "t=1: 0.5" in result.output

    def test_laplace_needs_positive_time(self, runner):
        assert invoke(runner, "laplace", "--atom", "1", "1", "--t", "0").exit_code == 2


class TestDiscrete:
    def test_chromatic_triangle(self, runner):
        result = invoke(runner, "chromatic", "--complete", "3", "--q", "3")
        assert result.exit_code == 0
        assert "chi(3) = 6" in result.output
        assert "log-concave: true" in result.output

    def test_chromatic_graph_file(self, runner, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("4\n0 1\n1 2\n2 3\n3 0\n", encoding="utf-8")
        result = invoke(runner, "chromatic", "--graph", str(path), "--q", "2")
        assert "chi(2) = 2" in result.output

    def test_chromatic_needs_one_source(self, runner):
        assert invoke(runner, "chromatic", "--complete", "3", "--path", "3").exit_code == 2

    def test_seq(self, runner):
        result = invoke(runner, "seq", "1,4,6,4,1")
        assert result.exit_code == 0
        assert "log-concave: true" in result.output

    def test_seq_reciprocal(self, runner):
        result = invoke(runner, "seq", "1 2 6 24", "--reciprocal")
        assert "implication holds: true" in result.output

    def test_mgl_convex(self, runner):
        result = invoke(runner, "mgl", "--p", "0.1,0.3", "--x", "0:1:0.01")
        assert result.exit_code == 0
        assert "NOT convex" not in result.output

    def test_mgl_violation_exits_3(self, runner):
        result = invoke(runner, "mgl", "--p", "0.1", "--x", "0:1:0.01", "--g", "square")
        assert result.exit_code == 3
        assert "NOT convex" in result.output


@pytest.mark.parametrize("command", ["derive", "certify", "search", "flow", "scan", "logconvex",
                                     "epi", "capacity", "laplace", "mgl", "chromatic", "seq"])
def test_help(runner, command):
    result = runner.invoke(cli, [command, "--help"])
    assert result.exit_code == 0
