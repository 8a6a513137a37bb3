import csv
import json
import math

import pytest

from walkcount.graph import (
    ColoredGraph,
    complete_bipartite,
    edge_color_bipartite,
    is_properly_colored,
    load_graph,
    save_graph,
)
from walkcount.run import main, write_csv


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestCommands:

    def test_qft_verify(self, tmp_path, capsys):
        assert main(["qft-verify", "--p_max", "6", "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "qft_verify.csv")
        assert [r["p"] for r in rows] == ["1", "2", "3", "4", "5", "6"]
        assert all(r["pass"] == "1" and float(r["max_abs_dev"]) < 1e-12 for r in rows)
        assert "Result: PASS" in capsys.readouterr().out

    def test_fourier_figures(self, tmp_path):
        assert main(["fourier-fig", "--P", "8", "--omegas", "1.5", "--curves", "3", "30",
                     "--out", str(tmp_path)]) == 0
        amplitudes = read_rows(tmp_path / "fourier_P8_omega1.5.csv")
        assert len(amplitudes) == 8
        assert float(amplitudes[0]["re"]) == pytest.approx(1 / math.sqrt(8))
        curve = read_rows(tmp_path / "f_curve_P3.csv")
        minimum = [r for r in curve if r["is_min"] == "1"]
        assert len(minimum) == 1 and float(minimum[0]["w"]) == pytest.approx(0.5)
        assert (tmp_path / "f_curve_P30.csv").exists()

    def test_fw_min(self, tmp_path):
        assert main(["fw-min", "--P_values", "3", "30", "64", "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "fw_min.csv")
        assert float(rows[0]["f_half"]) == pytest.approx(8 / 9)
        assert all(float(r["argmin"]) == pytest.approx(0.5) for r in rows)

    def test_appendix_a(self, tmp_path):
        assert main(["appendix-a", "--P_min", "3", "--P_max", "16", "--out", str(tmp_path)]) == 0
        assert read_rows(tmp_path / "appendix_a_violations.csv") == []
        assert len(read_rows(tmp_path / "appendix_a.csv")) == 14 * 7

    def test_grover(self, tmp_path):
        assert main(["grover", "--n_max", "5", "--angle_N", "4", "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "grover_search.csv")
        assert len(rows) == sum(2 ** n - 1 for n in range(1, 6))
        four = next(r for r in rows if r["N"] == "4" and r["k"] == "1")
        assert float(four["success_probability"]) == pytest.approx(1.0, abs=1e-12)
        assert len(read_rows(tmp_path / "grover_angles_N4.csv")) == 5

    def test_count(self, tmp_path):
        assert main(["count", "--trials", "400", "--seed", "7", "--out", str(tmp_path)]) == 0
        trials = read_rows(tmp_path / "count_trials.csv")
        assert len(trials) == 400
        assert [r["stream"] for r in trials[:3]] == ["0", "1", "2"]
        assert {r["seed"] for r in trials} == {"7"}
        summary = json.loads((tmp_path / "count_summary.json").read_text())
        assert summary["passed"] is True
        assert summary["exact_within_bound_probability"] >= 8 / math.pi ** 2
        assert len(read_rows(tmp_path / "count_outcomes.csv")) == 32

    def test_count_exact_case(self, tmp_path):
        assert main(["count", "--k", "0", "--trials", "50", "--out", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "count_summary.json").read_text())
        assert summary["success_frequency"] == 1.0

    def test_walk_count(self, tmp_path):
        assert main(["walk-count", "--trials", "400", "--out", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "walk_count_summary.json").read_text())
        assert summary["passed"] is True
        assert summary["predicted_distribution_deviation"] < 1e-12
        assert summary["params"] == {"n1": 4, "k1": 1, "p": 5, "t": 3, "seed": 20240101, "trials": 400}

    def test_walk_count_without_marked_vertices(self, tmp_path):
        assert main(["walk-count", "--k1", "0", "--trials", "50", "--out", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "walk_count_summary.json").read_text())
        assert summary["success_frequency"] == 1.0
        assert summary["exact_branches"] == 50
        assert not (tmp_path / "walk_count_distribution.csv").exists()

    def test_walk_count_writes_its_graph(self, tmp_path):
        assert main(["walk-count", "--trials", "50", "--out", str(tmp_path)]) == 0
        g = load_graph(tmp_path / "walk_count_graph.json")
        assert isinstance(g, ColoredGraph)
        assert g.graph.parts == (4, 4)
        assert g.graph.edges == complete_bipartite(4, 4).edges
        assert is_properly_colored(g)

    def test_walk_count_reads_a_graph(self, tmp_path):
        n = 4
        g = complete_bipartite(n, n)
        shifted = ColoredGraph(g, n, {(u, n + v): (u - v) % n for u in range(n) for v in range(n)})
        save_graph(shifted, tmp_path / "k44.json")
        assert main(["walk-count", "--graph", str(tmp_path / "k44.json"), "--trials", "400",
                     "--out", str(tmp_path / "run")]) == 0
        summary = json.loads((tmp_path / "run" / "walk_count_summary.json").read_text())
        assert summary["passed"] is True
        assert summary["predicted_distribution_deviation"] < 1e-12
        assert load_graph(tmp_path / "run" / "walk_count_graph.json") == shifted

    def test_walk_count_rejects_unusable_graphs(self, tmp_path):
        save_graph(complete_bipartite(4, 4), tmp_path / "plain.json")
        save_graph(edge_color_bipartite(complete_bipartite(3, 3)), tmp_path / "k33.json")
        for name in ("plain.json", "k33.json", "missing.json"):
            assert main(["walk-count", "--graph", str(tmp_path / name), "--trials", "10",
                         "--out", str(tmp_path / "run")]) == 2

    def test_spectrum(self, tmp_path):
        assert main(["spectrum", "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "spectrum.csv")
        assert len(rows) == 8
        assert [r["label"] for r in rows][:2] == ["+Sigma", "-Sigma"]
        assert load_graph(tmp_path / "spectrum_graph.json").vertex_count == 80
        assert math.fsum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-12)
        sigma = (math.acos(0.9) + math.acos(0.95)) / 2
        assert float(rows[0]["angle"]) == pytest.approx(sigma)

    def test_database_commit(self, tmp_path):
        db = tmp_path / "runs.db"
        assert main(["walk-count", "--trials", "100", "--db", str(db), "--out", str(tmp_path)]) == 0
        assert db.exists()


class TestDeterminism:

    @pytest.mark.parametrize("command,artifact", [("count", "count_trials.csv"),
                                                  ("walk-count", "walk_count_trials.csv")])
    def test_byte_identical_reruns(self, tmp_path, command, artifact):
        for run in ("a", "b"):
            assert main([command, "--trials", "200", "--seed", "42", "--out", str(tmp_path / run)]) == 0
        assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()


class TestExitCodes:

    def test_malformed_flag(self):
        with pytest.raises(SystemExit) as exc:
            main(["qft-verify", "--p_max", "six"])
        assert exc.value.code == 2

    def test_configuration_error(self, tmp_path):
        assert main(["count", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2

    def test_config_file(self, tmp_path):
        config = tmp_path / "spectrum.json"
        config.write_text(json.dumps({"n1": 4, "n2": 4, "k1": 1, "k2": 1}))
        assert main(["spectrum", "--config", str(config), "--out", str(tmp_path)]) == 0
        probabilities = {r["label"]: float(r["probability"]) for r in read_rows(tmp_path / "spectrum.csv")}
        assert probabilities["+Sigma"] == pytest.approx(0.25)
        assert probabilities["+(Sigma+pi)"] == 0.0


def test_csv_cells(tmp_path):
    path = write_csv(tmp_path / "cells.csv", ("a", "b", "c"), [(0.1, True, 3)])
    assert path.read_text() == "a,b,c\n0.10000000000000001,1,3\n"
