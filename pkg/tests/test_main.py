import json

import pytest

import main
from dfrc_tracker.harness import RunResult, RunSummary, TrialResult

FAST = ["--trials", "2", "--epochs", "5", "--quiet"]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("DFRC_TRACKER_CONFIG", "DFRC_TRACKER_SEED", "DFRC_TRACKER_OUT", "DFRC_TRACKER_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    # Keep a developer's .env out of the tests.
    monkeypatch.setattr(main, "load_dotenv", lambda *args, **kwargs: False)


def test_run_writes_artifacts(tmp_path):
    assert main.main(["run", "--out", str(tmp_path), *FAST]) == main.EXIT_OK
    assert (tmp_path / "trace.csv").exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config_echo"]["trials"] == 2
    assert summary["config_echo"]["epochs"] == 5


def test_scheme_and_seed_flags(tmp_path):
    code = main.main(["run", "--out", str(tmp_path), "--scheme", "dfrc", "--seed", "0x10", *FAST])
    assert code == main.EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config_echo"]["master_seed"] == 16
    assert list(summary["per_scheme"]) == ["dfrc"]


def test_trial_command(tmp_path, capsys):
    code = main.main(["trial", "--out", str(tmp_path), "--scheme", "feedback", "--epochs", "4", "--index", "2"])
    assert code == main.EXIT_OK
    out = capsys.readouterr().out
    assert "trial 2" in out
    assert len((tmp_path / "trace.csv").read_text().splitlines()) == 1 + 4


def test_sweep_command(tmp_path):
    code = main.main(["sweep", "--key", "n_antennas", "--values", "16,32", "--out", str(tmp_path), *FAST])
    assert code == main.EXIT_OK
    assert (tmp_path / "n_antennas=16" / "summary.json").exists()
    assert (tmp_path / "sweep.json").exists()


def test_environment_defaults(tmp_path, monkeypatch):
    monkeypatch.setenv("DFRC_TRACKER_OUT", str(tmp_path / "env-out"))
    monkeypatch.setenv("DFRC_TRACKER_SEED", "7")
    assert main.main(["run", *FAST]) == main.EXIT_OK
    summary = json.loads((tmp_path / "env-out" / "summary.json").read_text())
    assert summary["config_echo"]["master_seed"] == 7


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"antennas": 64}))
    assert main.main(["run", "--config", str(bad), "--out", str(tmp_path), *FAST]) == main.EXIT_CONFIG


def test_unknown_sweep_key(tmp_path):
    code = main.main(["sweep", "--key", "bogus", "--values", "1", "--out", str(tmp_path), *FAST])
    assert code == main.EXIT_CONFIG


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main.main(["run", "--out", str(blocker), *FAST]) == main.EXIT_IO


def test_all_diverged_exit_code(tmp_path, monkeypatch):
    def diverged_run(cfg, out_dir=None, plots=False, progress=False):
        trials = [TrialResult(scheme="dfrc", trial=i, seed=i, diverged=True) for i in range(2)]
        return RunResult(trials=trials, summary=RunSummary())

    monkeypatch.setattr(main, "run_monte_carlo", diverged_run)
    assert main.main(["run", "--out", str(tmp_path), *FAST]) == main.EXIT_DIVERGED


def test_non_integer_config_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"epochs": 2.5, "trials": True}))
    assert main.main(["run", "--config", str(bad), "--out", str(tmp_path), "--quiet"]) == main.EXIT_CONFIG


@pytest.mark.parametrize("name", ["DFRC_TRACKER_SEED", "DFRC_TRACKER_WORKERS"])
def test_malformed_integer_environment(tmp_path, monkeypatch, capsys, name):
    monkeypatch.setenv(name, "abc")
    with pytest.raises(SystemExit) as excinfo:
        main.main(["run", "--out", str(tmp_path), *FAST])
    assert excinfo.value.code == main.EXIT_CONFIG
    assert "abc" in capsys.readouterr().err


def test_hex_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DFRC_TRACKER_SEED", "0x10")
    assert main.main(["run", "--out", str(tmp_path), *FAST]) == main.EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config_echo"]["master_seed"] == 16
