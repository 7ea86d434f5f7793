import csv
import json

import pytest

from decentsim.cli import main, results_payload_bytes, run
from decentsim.config import parse_config


@pytest.fixture()
def uniform21(tmp_path):
    path = tmp_path / "uniform21.csv"
    rows = "\n".join(f"delegate{i:02d},10" for i in range(21))
    path.write_text("address,blocks\n" + rows + "\n", encoding="utf-8")
    return path


def read_report(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestMetricsCommand:
    def test_uniform_delegates_anchor(self, uniform21, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["metrics", "--input", str(uniform21), "--out", str(out)])
        assert code == 0
        report = read_report(out)
        full = report["results"]["levels"][0]
        assert full["share"] == "100"
        assert abs(full["entropy_bits"] - 4.392) < 5e-4
        assert full["gini"] == 0.0

    def test_metrics_csv_layout(self, uniform21, tmp_path):
        out_csv = tmp_path / "table.csv"
        main(["metrics", "--input", str(uniform21), "--csv_out", str(out_csv),
              "--out", str(tmp_path / "r.json")])
        with out_csv.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == [
            "addresses_100", "gini_100", "entropy_100",
            "addresses_50", "gini_50", "entropy_50",
            "addresses_33", "gini_33", "entropy_33",
        ]
        assert len(rows) == 2

    def test_missing_input_exit_code(self, tmp_path, capsys):
        code = main(["metrics", "--input", str(tmp_path / "absent.csv")])
        assert code == 3
        assert "DomainError" in capsys.readouterr().err


class TestCheckCommand:
    def test_fixed_cost_merge_example(self, tmp_path):
        out = tmp_path / "check.json"
        code = main([
            "check", "--model", "pow", "--br", "12.5", "--c2", "1",
            "--powers", "1,1", "--m", "2", "--out", str(out),
        ])
        assert code == 0
        results = read_report(out)["results"]
        assert results["gr"]["holds"] is True
        assert results["nd"]["holds"] is False
        witness = results["nd"]["witness"]
        assert witness["merged_total"] - witness["separate_total"] == pytest.approx(1.0)
        assert results["ed"] == "deferred"

    def test_search_bound_exit_code(self, capsys):
        code = main([
            "check", "--model", "pow", "--br", "1", "--powers", "1,1,1,1,1,1,1",
            "--m", "2",
        ])
        assert code == 4


class TestSweepCommand:
    def test_twelve_row_csv(self, tmp_path):
        out_csv = tmp_path / "curves.csv"
        code = main([
            "sweep", "--f_grid", "1e-4,1e-3,1e-2", "--epsilon_grid", "0,9,99,999",
            "--rho_grid", "0.1", "--samples", "2000", "--csv_out", str(out_csv),
            "--out", str(tmp_path / "r.json"),
        ])
        assert code == 0
        with out_csv.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["f", "epsilon", "rho", "estimate", "ci_low", "ci_high"]
        assert len(rows) == 13


class TestBoundCommand:
    def test_report_fields(self, tmp_path):
        out = tmp_path / "bound.json"
        code = main([
            "bound", "--f", "1e-4", "--rho", "0.1", "--samples", "5000",
            "--seed", "42", "--out", str(out),
        ])
        assert code == 0
        results = read_report(out)["results"]
        assert results["ci_low"] <= results["estimate"] <= results["ci_high"]
        assert len(results["per_k"]) == 101
        assert results["p0"] <= results["p0_analytic_bound"] + 3 * results["p0_std_error"]

    def test_budget_exit_code(self, capsys):
        code = main([
            "bound", "--f", "1e-4", "--rho", "0.1", "--samples", str(10**9),
            "--k_max", "10000",
        ])
        assert code == 5

    def test_config_error_exit_code(self, capsys):
        code = main(["bound", "--rho", "0.1"])
        assert code == 2
        assert "'f'" in capsys.readouterr().err


class TestSimulateCommand:
    ARGS = [
        "simulate", "--model", "gamma", "--br", "3", "--gamma", "0.5",
        "--r_max", "3", "--horizon", "40", "--n_nodes", "2",
        "--init", "explicit", "--init_powers", "4,1", "--seeds", "0,1",
    ]

    def test_trajectory_csv_format(self, tmp_path):
        traj_dir = tmp_path / "trajs"
        code = main(self.ARGS + [
            "--trajectories_dir", str(traj_dir), "--out", str(tmp_path / "r.json"),
        ])
        assert code == 0
        with (traj_dir / "trajectory_0.csv").open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["step", "ratio", "beta_1", "beta_2"]
        assert len(rows) == 42
        assert float(rows[1][2]) + float(rows[1][3]) == pytest.approx(1.0)

    def test_report_has_verdict(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(self.ARGS + ["--out", str(out)]) == 0
        results = read_report(out)["results"]
        assert results["n_seeds"] == 2
        assert "converged_fraction" in results["ed"]


class TestOutputDirEnv:
    def test_relative_out_resolves_against_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DECENTSIM_OUT", str(tmp_path))
        code = main(["anchors", "--out", "nested/report.json"])
        assert code == 0
        report = read_report(tmp_path / "nested" / "report.json")
        assert report["results"]["f_0"] == 7.58e-9


class TestDeterminism:
    def test_rerun_reproduces_results_payload(self):
        cfg = parse_config(
            "bound", overrides={"f": 1e-3, "rho": 0.1, "samples": 5000, "seed": 9}
        )
        first = run(cfg)
        second = run(cfg)
        assert results_payload_bytes(first) == results_payload_bytes(second)
        assert first["wall_time_s"] != 0  # timing sits outside the payload

    def test_stdout_report_round_trips(self, capsys):
        code = main(["anchors"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        rerun = run(parse_config("anchors", overrides=report["config"]))
        assert results_payload_bytes(rerun) == results_payload_bytes(report)

    def test_echoed_config_reruns_randomized_payload(self, capsys):
        code = main(["bound", "--f", "1e-3", "--rho", "0.1", "--samples", "3000",
                     "--seed", "11"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        rerun = run(parse_config("bound", overrides=report["config"]))
        assert results_payload_bytes(rerun) == results_payload_bytes(report)
