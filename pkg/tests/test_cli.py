import csv
import json

import pytest

from ocpbench.cli import (
    main,
    parse_alpha_grid,
    parse_kv_spec,
    parse_seeds,
)
from ocpbench.generators import ingest_csv
from ocpbench.metrics import compute_metrics
from ocpbench.predictors import make_predictor, run_predictor


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestSpecParsing:
    def test_plain_name(self):
        assert parse_kv_spec("up", "predictor") == ("up", {})

    def test_params(self):
        name, params = parse_kv_spec("sfogd:eta=25,eps=1e-6", "predictor")
        assert name == "sfogd" and params == {"eta": "25", "eps": "1e-6"}

    def test_malformed_param(self):
        with pytest.raises(ValueError):
            parse_kv_spec("sfogd:eta", "predictor")

    def test_seed_range(self):
        assert parse_seeds("1..4") == [1, 2, 3, 4]

    def test_seed_list(self):
        assert parse_seeds("3,5,9") == [3, 5, 9]

    def test_bad_seeds(self):
        with pytest.raises(ValueError):
            parse_seeds("a,b")

    def test_alpha_grid(self):
        grid = parse_alpha_grid("3:0.1:0.3")
        assert grid == pytest.approx([0.1, 0.2, 0.3])

    def test_bad_alpha_grid(self):
        with pytest.raises(ValueError):
            parse_alpha_grid("3:0.0:0.5")
        with pytest.raises(ValueError):
            parse_alpha_grid("nope")


class TestExitCodes:
    def test_usage_error_is_1(self, tmp_path, capsys):
        assert main(["run", "--predictor", "nope", "--out", str(tmp_path)]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_parse_error_is_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,score\n1,-2\n")
        code = main(["run", "--predictor", "up", "--csv", str(bad), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "parse error" in capsys.readouterr().err

    def test_io_error_is_3(self, tmp_path, capsys):
        code = main(
            ["run", "--predictor", "up", "--csv", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")]
        )
        assert code == 3
        err = capsys.readouterr().err
        assert "missing.csv" in err

    def test_unknown_flag_is_1(self, capsys):
        assert main(["run", "--frobnicate"]) == 1


class TestRunCommand:
    def run_small(self, tmp_path, *extra):
        out = tmp_path / "out"
        args = [
            "run",
            "--predictor", "up",
            "--alpha", "0.1",
            "--generator", "sinusoid",
            "--horizon", "400",
            "--seed", "3",
            "--burn-in", "20",
            "--out", str(out),
            *extra,
        ]
        assert main(args) == 0
        return out

    def test_trace_schema(self, tmp_path):
        out = self.run_small(tmp_path)
        rows = read_csv(out / "trace.csv")
        assert rows[0] == ["t", "b", "score", "covered", "g", "wealth"]
        assert len(rows) == 401
        assert rows[1][0] == "1"
        assert rows[1][5] != ""  # wealth tracked for the portfolio bettor

    def test_wealth_blank_for_stateless_predictors(self, tmp_path):
        out = tmp_path / "o"
        assert main(
            [
                "run", "--predictor", "osd:eta=1", "--horizon", "50",
                "--burn-in", "0", "--out", str(out), "--no-figures",
            ]
        ) == 0
        rows = read_csv(out / "trace.csv")
        assert all(r[5] == "" for r in rows[1:])

    def test_report_schema_and_verdicts(self, tmp_path):
        out = self.run_small(tmp_path)
        report = json.loads((out / "report.json").read_text())
        assert report["schema_version"] == 1
        assert report["predictor"] == "up"
        assert set(report["metrics"]) == {
            "marginal_coverage", "miscov", "longest_error_run", "rounds_used",
            "mean_size", "median_size", "q75_size", "q90_size", "q95_size",
        }
        names = [c["name"] for c in report["bound_checks"]]
        assert "per_round_reward" in names
        assert "up_coverage_bound" in names
        assert all(c["holds"] for c in report["bound_checks"])

    def test_figure_written_and_optional(self, tmp_path):
        out = self.run_small(tmp_path)
        assert (out / "local.png").exists()
        out2 = tmp_path / "out2"
        assert main(
            ["run", "--predictor", "up", "--horizon", "200", "--out", str(out2), "--no-figures"]
        ) == 0
        assert not (out2 / "local.png").exists()

    def test_trivial_coverage_exact(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            [
                "run",
                "--predictor", "trivial",
                "--alpha", "0.2",
                "--horizon", "100",
                "--burn-in", "0",
                "--out", str(out),
                "--no-figures",
            ]
        )
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["metrics"]["marginal_coverage"] == pytest.approx(0.8, abs=1e-15)
        assert report["metrics"]["mean_size"] == {"value": None, "infinite": True}

    def test_round_trip_through_ingest(self, tmp_path):
        """trace.csv scores re-ingested and replayed reproduce the coverage fields."""
        out = self.run_small(tmp_path)
        rows = read_csv(out / "trace.csv")
        extracted = tmp_path / "scores.csv"
        with open(extracted, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "score"])
            for r in rows[1:]:
                writer.writerow([r[0], r[2]])
        scores = ingest_csv(extracted)
        trace = run_predictor(make_predictor("up", 0.1), scores)
        report = compute_metrics(trace, 20, 0.1)
        saved = json.loads((out / "report.json").read_text())
        assert report.marginal_coverage == saved["metrics"]["marginal_coverage"]
        assert report.miscov == saved["metrics"]["miscov"]
        assert report.longest_error_run == saved["metrics"]["longest_error_run"]

    def test_stdout_mode(self, capsys):
        code = main(
            ["run", "--predictor", "kt", "--horizon", "30", "--burn-in", "0", "--out", "-"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "t,b,score,covered,g,wealth"
        assert len(lines) == 31

    def test_alpha_correct_label(self, tmp_path):
        out = tmp_path / "o"
        assert main(
            [
                "run", "--predictor", "up", "--alpha", "0.1", "--horizon", "100",
                "--alpha-correct", "0.5", "--out", str(out), "--no-figures",
            ]
        ) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["predictor"] == "up+ac0.5"


class TestBenchCommand:
    def test_single_predictor_one_row(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            [
                "bench", "--predictor", "up", "--alpha", "0.1",
                "--horizon", "300", "--seeds", "1..2", "--burn-in", "10",
                "--out", str(out), "--no-figures",
            ]
        )
        assert code == 0
        rows = read_csv(out / "bench.csv")
        assert rows[0] == [
            "predictor", "seeds", "marginal_coverage", "longest_error_run",
            "mean_size", "median_size", "q75_size", "q90_size", "q95_size",
        ]
        assert len(rows) == 2
        assert rows[1][0] == "up" and rows[1][1] == "2"

    def test_infinity_serialization(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            [
                "bench", "--predictor", "trivial", "--alpha", "0.25",
                "--horizon", "200", "--seeds", "1", "--burn-in", "0",
                "--out", str(out), "--no-figures",
            ]
        )
        assert code == 0
        rows = read_csv(out / "bench.csv")
        assert rows[1][4] == "inf"  # mean size of the full/empty schedule
        payload = json.loads((out / "bench.json").read_text())
        assert payload["rows"][0]["mean_size"] == {"value": None, "infinite": True}

    def test_figure_rendered(self, tmp_path):
        out = tmp_path / "o"
        assert main(
            [
                "bench", "--predictor", "up,kt", "--horizon", "300",
                "--seeds", "1", "--window", "50", "--out", str(out),
            ]
        ) == 0
        assert (out / "bench_local.png").exists()


class TestParetoCommand:
    def test_single_point_per_predictor(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            [
                "pareto", "--predictor", "up,kt", "--alpha-grid", "1:0.1:0.1",
                "--horizon", "300", "--seeds", "1..2", "--burn-in", "10",
                "--out", str(out), "--no-figures",
            ]
        )
        assert code == 0
        rows = read_csv(out / "pareto.csv")
        assert rows[0] == ["predictor", "alpha", "coverage", "se_cov", "size", "se_size", "stat"]
        assert len(rows) == 3
        assert {r[0] for r in rows[1:]} == {"up", "kt"}
        assert all(r[6] == "mean" for r in rows[1:])

    def test_tracking_and_figures(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            [
                "pareto", "--predictor", "up", "--alpha-grid", "2:0.1:0.2",
                "--horizon", "300", "--seeds", "1", "--stat", "median",
                "--out", str(out),
            ]
        )
        assert code == 0
        rows = read_csv(out / "tracking.csv")
        assert rows[0] == ["predictor", "alpha", "target", "realized", "within_band"]
        assert len(rows) == 3
        assert (out / "pareto_median.png").exists()
        assert (out / "tracking.png").exists()

    def test_jobs_parallel_matches_serial(self, tmp_path):
        argv = [
            "pareto", "--predictor", "up", "--alpha-grid", "2:0.1:0.2",
            "--horizon", "200", "--seeds", "1..2", "--no-figures",
        ]
        serial, parallel = tmp_path / "s", tmp_path / "p"
        assert main(argv + ["--out", str(serial), "--jobs", "1"]) == 0
        assert main(argv + ["--out", str(parallel), "--jobs", "2"]) == 0
        assert (serial / "pareto.csv").read_text() == (parallel / "pareto.csv").read_text()

    def test_bad_stat_rejected(self, tmp_path):
        assert main(
            ["pareto", "--predictor", "up", "--stat", "max", "--out", str(tmp_path)]
        ) == 1


class TestConfigFile:
    def test_config_applies_and_flags_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# experiment settings\n"
            "predictor = kt\n"
            "alpha = 0.2\n"
            "horizon = 150\n"
            "burn-in = 5\n"
        )
        out = tmp_path / "o"
        code = main(
            ["run", "--config", str(cfg), "--alpha", "0.1", "--out", str(out), "--no-figures"]
        )
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["predictor"] == "kt"  # from config
        assert report["alpha"] == 0.1  # flag wins
        assert report["horizon"] == 150

    def test_unknown_key_is_parse_error(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("predictr = kt\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_malformed_line_is_parse_error(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("alpha\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_missing_config_is_io_error(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "none.cfg"), "--out", str(tmp_path / "o")]) == 3


class TestVerifyCommand:
    def test_negative_control_fails_with_4(self, tmp_path, capsys):
        code = main(["verify", "--corrupt-grads", "--out", str(tmp_path)])
        assert code == 4
        out = capsys.readouterr().out
        assert "per_round_reward" in out and "FAIL" in out
        rows = read_csv(tmp_path / "verify.csv")
        assert rows[0] == ["name", "observed", "bound", "holds", "slack"]
        reward_rows = [r for r in rows if r[0] == "per_round_reward"]
        assert reward_rows and reward_rows[0][3] == "0"
