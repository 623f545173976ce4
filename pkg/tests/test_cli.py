import json

import numpy as np
import pytest

from ginivar import IidNormal, PiecewiseVariance, ScenarioSpec, ZeroMean, generate_noise, generate_sample
from ginivar.cli import EXIT_INPUT, EXIT_OK, EXIT_STATS, main


def write_series_csv(path, values):
    path.write_text("\n".join(repr(float(v)) for v in values) + "\n", encoding="utf-8")


@pytest.fixture
def noise_csv(tmp_path):
    p = tmp_path / "x.csv"
    write_series_csv(p, generate_noise(IidNormal(), 2000, 11).values)
    return p


class TestTestCommand:
    def test_json_report_to_file(self, tmp_path, noise_csv):
        out = tmp_path / "report.json"
        rc = main(["test", "--input", str(noise_csv), "--out", str(out)])
        assert rc == EXIT_OK
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert payload["kind"] == "test_result"
        assert payload["ell"] == 204 and payload["b"] == 9
        assert isinstance(payload["reject"], bool)
        # plot-ready companions land next to the report
        assert (tmp_path / "report_blocks.csv").exists()
        assert (tmp_path / "report_series.csv").exists()

    def test_csv_format_stdout(self, noise_csv, capsys):
        rc = main(["test", "--input", str(noise_csv), "--format", "csv"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("n,s,q,alpha")

    def test_plot_rendered(self, tmp_path, noise_csv):
        fig = tmp_path / "fig.png"
        rc = main(["test", "--input", str(noise_csv), "--plot", str(fig)])
        assert rc == EXIT_OK
        assert fig.stat().st_size > 1000

    def test_missing_file_is_input_error(self, tmp_path, capsys):
        rc = main(["test", "--input", str(tmp_path / "nope.csv")])
        assert rc == EXIT_INPUT
        assert "ginivar:" in capsys.readouterr().err

    def test_constant_series_is_statistical_error(self, tmp_path, capsys):
        p = tmp_path / "const.csv"
        write_series_csv(p, np.ones(500))
        rc = main(["test", "--input", str(p)])
        assert rc == EXIT_STATS
        assert "degenerate" in capsys.readouterr().err

    def test_too_short_sample_is_statistical_error(self, tmp_path):
        p = tmp_path / "short.csv"
        write_series_csv(p, np.arange(5.0))
        assert main(["test", "--input", str(p)]) == EXIT_STATS

    def test_preprocessing_chain(self, tmp_path, capsys):
        # drop one bad position, then difference: n = 2001 - 1 - 1 = 1999
        p = tmp_path / "x.csv"
        values = list(generate_noise(IidNormal(), 2000, 3).values)
        values.insert(1000, 80.0)
        write_series_csv(p, np.cumsum(values))
        rc = main(["test", "--input", str(p), "--pre", "drop:1001", "--pre", "diff",
                   "--format", "json"])
        assert rc == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["n"] == 1999

    def test_unknown_preprocessing(self, noise_csv):
        assert main(["test", "--input", str(noise_csv), "--pre", "smooth"]) == EXIT_INPUT


class TestLocateCommand:
    @pytest.fixture
    def break_csv(self, tmp_path):
        var = PiecewiseVariance(levels=(1.0, 1.6, 1.0), breakpoints=(1 / 3, 2 / 3))
        x = generate_sample(ScenarioSpec(IidNormal(), ZeroMean(), var, 20_000, 101))
        p = tmp_path / "breaks.csv"
        write_series_csv(p, x.values)
        return p

    def test_locate_json(self, tmp_path, break_csv, capsys):
        rc = main(["locate", "--input", str(break_csv)])
        assert rc == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["kind"] == "changepoints"
        assert len(payload["points"]) == 3

    def test_alpha_nesting_on_fixture(self, break_csv, capsys):
        main(["locate", "--input", str(break_csv), "--alpha", "0.05"])
        at05 = {p["index"] for p in json.loads(capsys.readouterr().out)["points"]}
        main(["locate", "--input", str(break_csv), "--alpha", "0.01"])
        at01 = {p["index"] for p in json.loads(capsys.readouterr().out)["points"]}
        assert at01 < at05  # strict: the weakest split drops at the tighter level

    def test_locate_csv_rows(self, break_csv, capsys):
        rc = main(["locate", "--input", str(break_csv), "--format", "csv"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 4

    def test_margin_flag(self, break_csv, capsys):
        rc = main(["locate", "--input", str(break_csv), "--margin", "40"])
        assert rc == EXIT_OK
        assert json.loads(capsys.readouterr().out)["config"]["margin"] == 40

    def test_seasonal_workflow(self, tmp_path, capsys):
        from ginivar.dgp import Ar1, SineMean

        var = PiecewiseVariance(levels=(1.0, 1.7), breakpoints=(0.55,))
        x = generate_sample(ScenarioSpec(Ar1(0.4), SineMean(3.0), var, 2132, 7))
        p = tmp_path / "weekly.csv"
        write_series_csv(p, x.values)
        rc = main(["locate", "--input", str(p), "--pre", "sdiff:52"])
        assert rc == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert [pt["index"] for pt in payload["points"]] == [1168]


class TestLrvCommand:
    def test_json_fields(self, noise_csv, capsys):
        rc = main(["lrv", "--input", str(noise_csv)])
        assert rc == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["kind"] == "lrv"
        assert payload["lrv_ell"] == 44 and payload["lrv_b"] == 45
        assert payload["kappa_hat"] > 0


class TestSimulateCommand:
    def make_config(self, tmp_path, seed=5):
        cfg = {
            "noise": {"kind": "ar1", "phi": 0.4},
            "mean": {"kind": "zero"},
            "variance": {"kind": "alternative", "id": "A1"},
            "n": 1500,
            "seed": seed,
        }
        p = tmp_path / "scenario.json"
        p.write_text(json.dumps(cfg), encoding="utf-8")
        return p

    def test_simulate_deterministic(self, tmp_path):
        cfg = self.make_config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--scenario", str(cfg), "--out", str(out1)]) == EXIT_OK
        assert main(["simulate", "--scenario", str(cfg), "--out", str(out2)]) == EXIT_OK
        assert out1.read_text(encoding="utf-8") == out2.read_text(encoding="utf-8")
        assert (tmp_path / "a_scenario.json").exists()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = self.make_config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["simulate", "--scenario", str(cfg), "--out", str(out1), "--seed", "5"])
        main(["simulate", "--scenario", str(cfg), "--out", str(out2), "--seed", "6"])
        assert out1.read_text(encoding="utf-8") != out2.read_text(encoding="utf-8")

    def test_simulated_sample_round_trips_through_test(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path)
        out = tmp_path / "sim.csv"
        main(["simulate", "--scenario", str(cfg), "--out", str(out)])
        rc = main(["test", "--input", str(out), "--column", "value"])
        assert rc == EXIT_OK
        assert json.loads(capsys.readouterr().out)["n"] == 1500

    def test_bad_config_is_input_error(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(
            json.dumps({"noise": {"kind": "white"}, "n": 100, "seed": 1}), encoding="utf-8"
        )
        assert main(["simulate", "--scenario", str(p), "--out", str(tmp_path / "o.csv")]) == EXIT_INPUT


class TestMcCommand:
    def test_single_cell_json(self, tmp_path, capsys):
        cfg = {
            "mode": "size",
            "noise": {"kind": "iid_normal"},
            "n": 400,
            "replications": 200,
            "base_seed": 5,
        }
        p = tmp_path / "mc.json"
        p.write_text(json.dumps(cfg), encoding="utf-8")
        out = tmp_path / "mc_report.json"
        rc = main(["mc", "--spec", str(p), "--threads", "1", "--out", str(out)])
        assert rc == EXIT_OK
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert payload["kind"] == "experiment"
        assert len(payload["reports"]) == 1
        assert 0.0 <= payload["reports"][0]["rejection_rate"] <= 1.0
        assert (tmp_path / "mc_report_table.txt").exists()

    def test_multi_cell_csv_and_seed_override(self, tmp_path, capsys):
        cfg = {
            "experiments": [
                {"mode": "size", "noise": {"kind": "iid_normal"}, "n": 400,
                 "replications": 200, "base_seed": 5},
                {"mode": "power_nominal", "noise": {"kind": "iid_normal"}, "n": 400,
                 "replications": 200, "base_seed": 5, "alternative": "A1"},
            ]
        }
        p = tmp_path / "mc.json"
        p.write_text(json.dumps(cfg), encoding="utf-8")
        rc = main(["mc", "--spec", str(p), "--format", "csv", "--seed", "9"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert all(",9," in line for line in lines[1:])


class TestParser:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "ginivar" in capsys.readouterr().out

    def test_subcommand_required(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
