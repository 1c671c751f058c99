"""Command-line behavior and exit codes."""

import warnings

import pytest

from prodsize import cli
from prodsize.dataset import save_config, save_publications, save_roster
from prodsize.synth import WorldConfig, generate_world, world_to_files


@pytest.fixture(scope="module")
def world_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("world")
    ds, truth = generate_world(WorldConfig(n_sds=6, n_universities=24, seed=31))
    world_to_files(ds, path, truth)
    return path


def run(argv):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return cli.main(argv)


class TestHelp:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--help"])
        assert exc.value.code == 0
        assert "prodsize" in capsys.readouterr().out


class TestIngest:
    def test_clean_world(self, world_dir, capsys):
        assert run(["--config", str(world_dir / "config.toml"), "ingest"]) == 0
        out = capsys.readouterr().out
        assert "publications:" in out
        assert "issues:       0" in out

    def test_missing_config(self, tmp_path, capsys):
        assert run(["--config", str(tmp_path / "nope.toml"), "ingest"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_no_config_at_all(self, capsys, monkeypatch):
        monkeypatch.delenv("PRODSIZE_CONFIG", raising=False)
        assert run(["ingest"]) == 2


class TestScore:
    def test_writes_score_files(self, world_dir, tmp_path):
        out = tmp_path / "scores"
        assert run(["--config", str(world_dir / "config.toml"), "--out", str(out), "score"]) == 0
        for name in ("unit_scores.csv", "scientist_scores.csv", "baselines.csv"):
            assert (out / name).exists()

    def test_missing_roster_exits_two(self, tmp_path, capsys):
        ds, _ = generate_world(WorldConfig(n_sds=2, n_universities=6, seed=1))
        save_publications(ds.publications, tmp_path / "publications.jsonl")
        save_config(tmp_path / "config.toml", ds.period, ds.category_lifesci)
        # roster.csv deliberately absent
        assert run(["--config", str(tmp_path / "config.toml"), "--out", str(tmp_path), "score"]) == 2

    def test_malformed_publications_exit_two(self, tmp_path):
        (tmp_path / "publications.jsonl").write_text("{broken\n")
        ds, _ = generate_world(WorldConfig(n_sds=2, n_universities=6, seed=1))
        save_roster(ds.roster, tmp_path / "roster.csv")
        save_config(tmp_path / "config.toml", ds.period, ds.category_lifesci)
        assert run(["--config", str(tmp_path / "config.toml"), "--out", str(tmp_path), "score"]) == 2

    def test_score_deterministic(self, world_dir, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run(["--config", str(world_dir / "config.toml"), "--out", str(out1), "score"])
        run(["--config", str(world_dir / "config.toml"), "--out", str(out2), "score"])
        for name in ("unit_scores.csv", "scientist_scores.csv", "baselines.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestAnalyzeAndReport:
    def test_analyze_writes_reports(self, world_dir, tmp_path, capsys):
        out = tmp_path / "out"
        assert run(["--config", str(world_dir / "config.toml"), "--seed", "9", "--out", str(out), "analyze"]) == 0
        stdout = capsys.readouterr().out
        assert "TOTAL" in stdout
        assert (out / "report_summary.csv").exists()
        assert (out / "report_increasing.csv").exists()
        assert (out / "plots").is_dir()

    def test_report_prints_previous_run(self, world_dir, tmp_path, capsys):
        out = tmp_path / "out"
        run(["--config", str(world_dir / "config.toml"), "--seed", "9", "--out", str(out), "analyze"])
        capsys.readouterr()
        assert run(["--config", str(world_dir / "config.toml"), "--out", str(out), "report"]) == 0
        assert "uda_id,analysis" in capsys.readouterr().out

    def test_report_without_analyze_exits_two(self, world_dir, tmp_path):
        assert run(["--config", str(world_dir / "config.toml"), "--out", str(tmp_path / "empty"), "report"]) == 2


class TestSimulate:
    def test_simulate_writes_world(self, tmp_path, capsys):
        out = tmp_path / "sim"
        assert run(["--seed", "4", "--out", str(out), "simulate", "--sds", "3", "--universities", "8"]) == 0
        for name in ("publications.jsonl", "roster.csv", "config.toml", "sds_uda.csv", "ground_truth.json"):
            assert (out / name).exists()

    def test_simulate_beta_overrides(self, tmp_path):
        overrides = tmp_path / "beta.csv"
        overrides.write_text("sds_id,beta\nS000,1.5\n")
        out = tmp_path / "sim"
        assert run(
            ["--seed", "4", "--out", str(out), "simulate", "--sds", "2", "--universities", "8",
             "--beta-overrides", str(overrides)]
        ) == 0
        import json

        truth = json.loads((out / "ground_truth.json").read_text())
        assert truth["beta_by_sds"]["S000"] == 1.5
        assert truth["beta_by_sds"]["S001"] == 1.0

    def test_simulate_rejects_bad_rho(self, tmp_path, capsys):
        assert run(["--seed", "4", "--out", str(tmp_path), "simulate", "--rho", "2.0"]) == 2
        assert "rho" in capsys.readouterr().err
