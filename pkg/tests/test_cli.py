"""End-to-end tests for the command-line interface."""

import numpy as np
import pytest

from votespan import cli
from votespan.errors import RepresentationalDeficiencyError
from votespan.estimation import dependence_process_votes
from votespan.pli import DependenceProfile
from votespan.streams import write_vote_dump


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.splitlines(), captured.err


class TestPliCommand:
    def test_worked_example_curve(self, capsys):
        code, out, _ = run_cli(capsys, "pli", "--m", "2", "--p", "0.5",
                               "--n", "2..8")
        assert code == 0
        assert out[0] == "n,pli"
        assert len(out) == 8
        assert out[-1] == "8,0.9921875"

    def test_independent_profile_is_certain(self, capsys):
        code, out, _ = run_cli(capsys, "pli", "--m", "3", "--p", "0,0",
                               "--n", "3")
        assert code == 0
        assert float(out[-1].split(",")[1]) == 1.0

    def test_uniform_half_three_classes(self, capsys):
        code, out, _ = run_cli(capsys, "pli", "--m", "3", "--p", "0.5,0.5",
                               "--n", "4")
        assert code == 0
        assert float(out[-1].split(",")[1]) == 0.5

    def test_single_p_means_uniform(self, capsys):
        full = run_cli(capsys, "pli", "--m", "4", "--p", "0.3,0.3,0.3",
                       "--n", "4..9")
        uniform = run_cli(capsys, "pli", "--m", "4", "--p", "0.3",
                          "--n", "4..9")
        assert full == uniform

    def test_rejects_bad_inputs(self, capsys):
        assert run_cli(capsys, "pli", "--m", "3", "--p", "0.5,0.5,0.5",
                       "--n", "3")[0] == 2
        assert run_cli(capsys, "pli", "--m", "2", "--p", "0.5",
                       "--n", "8..2")[0] == 2
        assert run_cli(capsys, "pli", "--m", "2", "--p", "0.5",
                       "--n", "x")[0] == 2
        assert run_cli(capsys, "pli", "--m", "2", "--p", "1.5",
                       "--n", "4")[0] == 2


class TestSizeCommand:
    def test_half_profile_at_99(self, capsys):
        code, out, _ = run_cli(capsys, "size", "--m", "2", "--p", "0.5",
                               "--t", "0.99")
        assert code == 0
        assert out == ["quantity,value", "INC,8", "SINC,8"]

    def test_independent_profile_needs_exactly_m(self, capsys):
        code, out, _ = run_cli(capsys, "size", "--m", "7", "--p",
                               "0,0,0,0,0,0")
        assert code == 0
        assert out[1] == "INC,7"

    def test_low_threshold_three_classes(self, capsys):
        code, out, _ = run_cli(capsys, "size", "--m", "3", "--p", "0.5,0.5",
                               "--t", "0.49")
        assert code == 0
        assert out[1] == "INC,4"

    def test_unreachable_prints_dashes(self, capsys):
        code, out, _ = run_cli(capsys, "size", "--m", "2", "--p", "1")
        assert code == 0
        assert out == ["quantity,value", "INC,--", "SINC,--"]

    def test_threshold_bounds(self, capsys):
        code, _, err = run_cli(capsys, "size", "--m", "2", "--p", "0.5",
                               "--t", "1.0")
        assert code == 2
        assert "error:" in err


class TestEstimateCommand:
    def test_identical_votes_pin_first_dimension(self, capsys, tmp_path):
        path = tmp_path / "dump.csv"
        write_vote_dump(path, [np.full((4, 2), 0.5) for _ in range(20)])
        code, out, _ = run_cli(capsys, "estimate", "--votes", str(path))
        assert code == 0
        table = dict(line.split(",") for line in out[1:])
        assert float(table["p_1"]) == 1.0
        assert float(table["full_rank_fraction"]) == 0.0

    def test_distinct_one_hot_votes_are_independent(self, capsys, tmp_path):
        path = tmp_path / "dump.csv"
        write_vote_dump(path, [np.eye(3) for _ in range(10)])
        code, out, _ = run_cli(capsys, "estimate", "--votes", str(path))
        assert code == 0
        table = dict(line.split(",") for line in out[1:])
        assert float(table["p_1"]) == 0.0
        assert float(table["p_2"]) == 0.0
        assert float(table["full_rank_fraction"]) == 1.0
        assert float(table["pli_at_3"]) == 1.0

    def test_dependence_process_dump(self, capsys, tmp_path):
        votes = dependence_process_votes(
            DependenceProfile(2, (0.5,)), n=8, instances=1500, seed=11
        )
        path = tmp_path / "dump.csv"
        write_vote_dump(path, list(votes))
        code, out, _ = run_cli(capsys, "estimate", "--votes", str(path))
        assert code == 0
        table = dict(line.split(",") for line in out[1:])
        assert table["m"] == "2"
        assert table["instances"] == "1500"
        assert float(table["p_1"]) == pytest.approx(0.5, abs=0.05)
        assert float(table["full_rank_fraction"]) == pytest.approx(
            0.9921875, abs=0.02)
        assert float(table["pli_at_8"]) == pytest.approx(0.99, abs=0.02)

    def test_missing_dump_is_ingestion_failure(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "estimate", "--votes",
                               str(tmp_path / "nope.csv"))
        assert code == 2
        assert "not found" in err

    def test_numerical_failures_map_to_exit_4(self, capsys, tmp_path,
                                              monkeypatch):
        def boom(path):
            raise RepresentationalDeficiencyError("rank below class count")

        monkeypatch.setattr(cli, "read_vote_dump", boom)
        code, _, err = run_cli(capsys, "estimate", "--votes", "x.csv")
        assert code == 4
        assert "rank below class count" in err


EXPERIMENT_BASE = (
    "experiment", "--dataset", "rbf", "--m", "3", "--features", "4",
    "--centroids", "8", "--learner", "nb", "--sizes", "2,4",
    "--seeds", "2", "--instances", "300", "--workers", "1",
)


class TestExperimentCommand:
    def test_smoke_run_writes_reports(self, capsys, tmp_path):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(capsys, *EXPERIMENT_BASE, "--out",
                               str(out_dir), "--no-plot")
        assert code == 0
        assert out[0].startswith("dataset,method,m,SINC,INC")
        assert out[1].startswith("rbf,nb-majority,3,")
        for name in ("results_raw.csv", "results_summary.csv",
                     "p_profiles.csv", "pli_curve.csv"):
            assert (out_dir / name).exists()
        assert not list(out_dir.glob("*.png"))

    def test_finite_sizing_on_default_synthetic(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys, "experiment", "--m", "4", "--learner", "nb",
            "--sizes", "2,4,8", "--seeds", "2", "--instances", "10000",
            "--workers", "1", "--out", str(tmp_path / "out"), "--no-plot",
        )
        assert code == 0
        row = out[1].split(",")
        sinc, inc = row[3], row[4]
        assert sinc != "--" and int(sinc) >= 4
        assert inc != "--" and int(inc) >= 4

    def test_plot_flag_renders_figures(self, capsys, tmp_path):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(capsys, *EXPERIMENT_BASE, "--out",
                               str(out_dir), "--plot")
        assert code == 0
        pngs = sorted(p.name for p in out_dir.glob("*.png"))
        assert pngs == ["rbf_nb-majority_accuracy.png",
                        "rbf_nb-majority_profile.png"]
        assert sum(line.startswith("wrote ") for line in out) == 6

    def test_missing_dataset_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "experiment", "--dataset",
                               str(tmp_path / "absent.csv"), "--out",
                               str(tmp_path / "out"))
        assert code == 2
        assert "not found" in err

    def test_threshold_one_rejected(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, *EXPERIMENT_BASE, "--out",
                               str(tmp_path / "out"), "--t", "1.0",
                               "--no-plot")
        assert code == 2
        assert "error:" in err

    def test_tree_flags_rejected_for_naive_bayes(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, *EXPERIMENT_BASE, "--out",
                               str(tmp_path / "out"), "--grace-period",
                               "50", "--no-plot")
        assert code == 2
        assert "ht learner" in err

    def test_reproducible_runs_are_byte_identical(self, capsys, tmp_path):
        args = EXPERIMENT_BASE + ("--reproducible", "--no-plot")
        assert run_cli(capsys, *args, "--out", str(tmp_path / "a"))[0] == 0
        assert run_cli(capsys, *args, "--out", str(tmp_path / "b"))[0] == 0
        for name in ("results_raw.csv", "results_summary.csv",
                     "p_profiles.csv", "pli_curve.csv"):
            assert (tmp_path / "a" / name).read_bytes() \
                == (tmp_path / "b" / name).read_bytes()

    def test_config_file_supplies_defaults_flags_win(self, capsys,
                                                     tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# experiment defaults\n"
            "dataset = rbf\n"
            "m = 3\n"
            "features = 4\n"
            "centroids = 8\n"
            "learner = nb\n"
            "sizes = 2,4\n"
            "seeds = 2\n"
            "instances = 200\n"
            "plot = false\n"
        )
        out_dir = tmp_path / "out"
        code, _, _ = run_cli(capsys, "experiment", "--config", str(cfg),
                             "--out", str(out_dir), "--seeds", "3")
        assert code == 0
        raw = (out_dir / "results_raw.csv").read_text().splitlines()
        # the flag's 3 seeds beat the file's 2: 2 sizes x 3 seeds cells
        data = [line for line in raw if line[0].isdigit() or
                line.startswith("rbf")]
        assert len(data) == 6
        assert not list(out_dir.glob("*.png"))

    def test_config_file_errors(self, capsys, tmp_path):
        missing = run_cli(capsys, "experiment", "--config",
                          str(tmp_path / "absent.cfg"))
        assert missing[0] == 2
        bad = tmp_path / "bad.cfg"
        bad.write_text("sizes\n")
        assert run_cli(capsys, "experiment", "--config", str(bad))[0] == 2
