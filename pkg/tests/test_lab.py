import csv
import json

import pytest

from entlab.lab import cli
from entlab.lab.config import ConfigError, parse_config
from entlab.lab.experiments import REGISTRY
from entlab.lab.runner import run, validate

PAGE = """# page sweep
experiment = page-sweep
seed = 7
n_samples = 2000
N_A = 2,4
"""


def write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_config():
    cfg = parse_config(PAGE)
    assert cfg.experiment == "page-sweep"
    assert cfg.seed == 7 and cfg.n_samples == 2000
    assert cfg.params == {"N_A": "2,4"}
    with pytest.raises(ConfigError):
        parse_config("experiment = a\nexperiment = b\n")
    with pytest.raises(ConfigError):
        parse_config("seed = 1\n")
    with pytest.raises(ConfigError):
        parse_config("experiment = page-sweep\nbogus line\n")


def test_validate_diagnostics():
    assert validate(PAGE) == []
    diags = validate("experiment = page-sweep\nseed = 1\nN_A = 2\nextra = 3\n")
    assert "n_samples: missing" in diags
    assert "extra: unknown parameter" in diags
    assert validate("experiment = page-sweep\nseed = -5\nn_samples = 10\nN_A = 2\n") == []
    assert validate("experiment = page-sweep\nseed = 1\nn_samples = 10\n") == ["N_A: missing"]
    assert validate("experiment = nope\n")[0].startswith("experiment: unknown")


def test_registry_complete():
    assert set(REGISTRY) == {
        "haar-moments", "page-sweep", "purity-sweep", "mp-spectrum", "concentration",
        "circuit-trajectory", "markov-purity", "coulomb-min", "decoupling-sweep",
        "page-curve", "cv-moments", "cv-microcanonical", "fixed-purity",
    }


def test_run_writes_records(tmp_path):
    code, _, paths = run(PAGE, out=tmp_path)
    assert code == 0
    csv_path, meta_path = paths
    assert csv_path.name == "page-sweep-7.csv"
    rows = list(csv.DictReader(open(csv_path)))
    for row in rows:
        assert abs(float(row["mc_mean"]) - float(row["page_formula"])) < 3 * float(row["mc_stderr"])
    meta = json.loads(meta_path.read_text())
    assert meta["config_text"] == PAGE
    assert meta["closed_form_reference_columns"] == ["page_formula", "lower_bound"]
    assert meta["status"] == "ok"
    # 17 significant digits round-trip
    assert float(rows[0]["page_formula"]) == float(format(float(rows[0]["page_formula"]), ".17g"))


def test_determinism_and_threads(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(PAGE, out=a, threads=1)
    run(PAGE, out=b, threads=4)
    assert (a / "page-sweep-7.csv").read_bytes() == (b / "page-sweep-7.csv").read_bytes()


def test_seed_override_and_negative_seed(tmp_path):
    code, _, paths = run(PAGE, seed=-3, samples=100, out=tmp_path)
    assert code == 0
    assert paths[0].name == "page-sweep--3.csv"
    meta = json.loads(paths[1].read_text())
    assert meta["seed"] == -3 and meta["n_samples"] == 100


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "out"
    bad = write(tmp_path, "experiment = nope\nseed = 1\nn_samples = 5\n", "bad.cfg")
    assert cli.main(["run", str(bad), "--out", str(out)]) == 2
    assert not out.exists()
    big = write(tmp_path, "experiment = page-curve\nseed = 1\nn_samples = 2\nn = 15\n", "big.cfg")
    assert cli.main(["run", str(big), "--out", str(out)]) == 3
    assert cli.main(["run", str(tmp_path / "missing.cfg")]) == 2
    assert cli.main(["bogus"]) == 2


def test_cli_list_and_validate(tmp_path, capsys):
    assert cli.main(["list"]) == 0
    assert "coulomb-min" in capsys.readouterr().out
    cfg = write(tmp_path, "experiment = page-sweep\nseed = 1\nN_A = 2\n")
    assert cli.main(["validate", str(cfg)]) == 0
    assert "n_samples: missing" in capsys.readouterr().out


def test_lab_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("LAB_THREADS", "3")
    code, _, paths = run(PAGE, samples=600, out=tmp_path)
    assert json.loads(paths[1].read_text())["threads"] == 3


def test_trajectory_columns(tmp_path):
    text = "experiment = circuit-trajectory\nseed = 2\nn_samples = 2\nn = 4\nn_A = 2\nell = 6\n"
    code, _, paths = run(text, out=tmp_path)
    header = paths[0].read_text().splitlines()[0]
    assert header == "step,entropy_bits,purity,seed"


def test_coulomb_run(tmp_path):
    text = ("experiment = coulomb-min\nseed = 1\nn_samples = 2\nN_A = 12\nN_B = 12\n"
            "constraint = entropy_q1\nvalue = 0.7\nstarts = 2\n")
    code, _, paths = run(text, out=tmp_path)
    assert code == 0
    meta = json.loads(paths[1].read_text())
    assert meta["results"]["phase"] == "separable_like"
    assert meta["results"]["stationarity_residual"] < 1e-6


def test_nonconvergence_exit_code(tmp_path, monkeypatch):
    from entlab import coulomb
    from entlab.errors import ConvergenceError

    best = coulomb.GasConfiguration([0.2, 0.3, 0.5])

    def fail(*a, **k):
        raise ConvergenceError("stalled", best=best)

    monkeypatch.setattr(coulomb, "minimize_gas", fail)
    text = "experiment = coulomb-min\nseed = 1\nn_samples = 2\nN_A = 3\nN_B = 4\n"
    code, _, paths = run(text, out=tmp_path)
    assert code == 4
    meta = json.loads(paths[1].read_text())
    assert meta["partial"] is True and meta["status"] == "nonconverged"
