import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

from ptcopula.cli import CHECK_ORDER, RunConfig, dump_config, ingest_csv, load_config, main
from ptcopula.errors import IngestionError
from ptcopula.rng import stream

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def configs(tmp_path):
    """A scratch copy of the example configs so relative outputs stay in tmp."""
    dest = tmp_path / "configs"
    shutil.copytree(CONFIGS, dest)
    return dest


def write_yaml(path, doc):
    path.write_text(yaml.safe_dump(doc))
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestIngest:
    def test_numeric(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("1,2\n3,4\n5,6\n")
        np.testing.assert_array_equal(ingest_csv(p), [[1, 2], [3, 4], [5, 6]])

    def test_header(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("x,y\n1,2\n")
        assert ingest_csv(p, header=True).shape == (1, 2)
        with pytest.raises(IngestionError):
            ingest_csv(p)

    def test_non_numeric_location(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("1,2\n3,abc\n")
        with pytest.raises(IngestionError) as exc:
            ingest_csv(p)
        assert (exc.value.row, exc.value.col) == (2, 2)
        assert "row 2, column 2" in str(exc.value)

    def test_ragged(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("1,2\n3\n")
        with pytest.raises(IngestionError) as exc:
            ingest_csv(p)
        assert exc.value.row == 2 and exc.value.code == "ragged-row"

    def test_empty(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("")
        with pytest.raises(IngestionError) as exc:
            ingest_csv(p)
        assert exc.value.code == "empty-file"

    def test_missing(self, tmp_path):
        with pytest.raises(IngestionError):
            ingest_csv(tmp_path / "nope.csv")


class TestConfig:
    def test_round_trip(self, tmp_path):
        cfg = RunConfig("pt", 7, str(tmp_path / "out.csv"), None,
                        {"pt": {"threshold": [0.5, 0.5]}, "copula": {"family": "gumbel", "theta": 2.0}})
        p = tmp_path / "c.yaml"
        p.write_text(dump_config(cfg))
        assert load_config(p, "pt") == cfg

    @pytest.mark.parametrize("name", ["simulate", "pt", "empirical_pt", "functional", "verify", "quantile"])
    def test_examples_are_fixed_points(self, configs, name):
        sub = name.replace("_", "-")
        first = load_config(configs / f"{name}.yaml", sub)
        again = configs / f"{name}-again.yaml"
        again.write_text(dump_config(first))
        assert load_config(again, sub) == first

    def test_config_paths_relative_to_config(self, tmp_path):
        sub = tmp_path / "nested"
        sub.mkdir()
        p = write_yaml(sub / "c.yaml", {"seed": 1, "output": "o.csv", "input": "d.csv",
                                        "pt": {"margins_output": "m.csv"}})
        cfg = load_config(p, "pt")
        assert cfg.output == str(sub / "o.csv") and cfg.input == str(sub / "d.csv")
        assert cfg.model["pt"]["margins_output"] == str(sub / "m.csv")
        assert load_config(p, "pt", output="x.csv").output == "x.csv"

    def test_overrides(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", {"seed": 1, "output": "a.csv"})
        cfg = load_config(p, "simulate", seed=9, output="b.csv")
        assert cfg.seed == 9 and cfg.output == "b.csv"

    def test_seed_required(self, tmp_path, capsys):
        p = write_yaml(tmp_path / "c.yaml", {"generator": {"family": "constant", "dim": 2}})
        assert run_cli("simulate", "--config", p, "--output", tmp_path / "o.csv") == 2
        assert "error[missing-seed]" in capsys.readouterr().err

    def test_missing_config(self, tmp_path, capsys):
        assert run_cli("simulate", "--config", tmp_path / "none.yaml") == 2
        assert "error[missing-file]" in capsys.readouterr().err

    def test_bad_subcommand(self, tmp_path):
        assert run_cli("frobnicate", "--config", "x.yaml") == 2

    def test_bad_threshold_is_config_error(self, tmp_path, capsys):
        doc = yaml.safe_load((CONFIGS / "pt.yaml").read_text())
        doc["pt"]["threshold"] = [1.0, 0.5]
        p = write_yaml(tmp_path / "c.yaml", doc)
        assert run_cli("pt", "--config", p, "--output", tmp_path / "o.csv") == 2
        assert "error[invalid-threshold]" in capsys.readouterr().err

    def test_missing_section(self, tmp_path, capsys):
        p = write_yaml(tmp_path / "c.yaml", {"seed": 1})
        assert run_cli("pt", "--config", p, "--output", tmp_path / "o.csv") == 2
        assert "error[missing-section]" in capsys.readouterr().err

    def test_data_error_exit_3(self, tmp_path, capsys):
        (tmp_path / "d.csv").write_text("1,2\n3,x\n")
        doc = yaml.safe_load((CONFIGS / "empirical_pt.yaml").read_text())
        doc["empirical_pt"]["header"] = False
        p = write_yaml(tmp_path / "c.yaml", doc)
        rc = run_cli("empirical-pt", "--config", p, "--input", tmp_path / "d.csv", "--output", tmp_path / "o.csv")
        assert rc == 3
        assert "error[non-numeric]" in capsys.readouterr().err


SUBS = [
    ("simulate", "simulate.yaml", "csv"),
    ("pt", "pt.yaml", "csv"),
    ("empirical-pt", "empirical_pt.yaml", "csv"),
    ("functional", "functional.yaml", "csv"),
    ("quantile", "quantile.yaml", "json"),
]


class TestSubcommands:
    @pytest.mark.parametrize("sub,config,ext", SUBS, ids=[s[0] for s in SUBS])
    def test_runs_and_is_deterministic(self, tmp_path, configs, sub, config, ext):
        outs = []
        for k in range(2):
            out = tmp_path / f"out{k}.{ext}"
            assert run_cli(sub, "--config", configs / config, "--output", out, "--quiet") == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] and len(outs[0]) > 0

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli("simulate", "--config", CONFIGS / "simulate.yaml", "--output", a, "--quiet")
        run_cli("simulate", "--config", CONFIGS / "simulate.yaml", "--output", b, "--seed", 99, "--quiet")
        assert a.read_bytes() != b.read_bytes()

    def test_simulate_content(self, tmp_path):
        out = tmp_path / "s.csv"
        run_cli("simulate", "--config", CONFIGS / "simulate.yaml", "--output", out, "--quiet")
        lines = out.read_text().splitlines()
        assert lines[0] == "y1,y2" and len(lines) == 10_001
        y = np.loadtxt(out, delimiter=",", skiprows=1)
        assert ((y > 0) & (y < 1)).all()

    def test_pt_margins_output(self, tmp_path):
        doc = yaml.safe_load((CONFIGS / "pt.yaml").read_text())
        doc["pt"]["margins_output"] = str(tmp_path / "x.csv")
        p = write_yaml(tmp_path / "c.yaml", doc)
        assert run_cli("pt", "--config", p, "--output", tmp_path / "y.csv", "--quiet") == 0
        y = np.loadtxt(tmp_path / "y.csv", delimiter=",", skiprows=1)
        x = np.loadtxt(tmp_path / "x.csv", delimiter=",", skiprows=1)
        # Margin injection is monotone per column.
        for j in range(2):
            order = np.argsort(y[:, j])
            assert (np.diff(x[order, j]) >= 0).all()

    def test_functional_csv_layout(self, tmp_path):
        out = tmp_path / "p.csv"
        run_cli("functional", "--config", CONFIGS / "functional.yaml", "--output", out, "--quiet")
        lines = out.read_text().splitlines()
        assert lines[0] == "path,t,value" and len(lines) == 1 + 100 * 51

    @pytest.mark.parametrize("kind", ["gpp", "gpcp"])
    def test_functional_kinds(self, tmp_path, kind):
        doc = yaml.safe_load((CONFIGS / "functional.yaml").read_text())
        doc["functional"]["output_kind"] = kind
        p = write_yaml(tmp_path / "c.yaml", doc)
        assert run_cli("functional", "--config", p, "--output", tmp_path / "p.csv", "--quiet") == 0

    def test_quantile_exponential(self, tmp_path):
        data = stream(5).exponential(1.0, size=100_000)
        np.savetxt(tmp_path / "d.csv", data[:, None], fmt="%.17g")
        doc = {"seed": 1, "quantile": {"x0": 2.0, "levels": [0.99]}}
        p = write_yaml(tmp_path / "c.yaml", doc)
        out = tmp_path / "q.json"
        assert run_cli("quantile", "--config", p, "--input", tmp_path / "d.csv", "--output", out, "--quiet") == 0
        res = json.loads(out.read_text())
        truth = 2.0 + 1.0 * np.log((1 - res["F_x0"]) / 0.01)
        assert res["quantiles"]["0.99"] == pytest.approx(truth, rel=0.03)
        assert res["quantiles"]["0.99"] == pytest.approx(np.log(100), rel=0.03)
        assert res["mu"] == 2.0 and res["method"] in ("mle", "pwm")

    def test_quantile_below_threshold(self, tmp_path, capsys):
        data = stream(6).exponential(1.0, size=1000)
        np.savetxt(tmp_path / "d.csv", data[:, None])
        p = write_yaml(tmp_path / "c.yaml", {"seed": 1, "quantile": {"x0": 1.0, "levels": [0.3]}})
        assert run_cli("quantile", "--config", p, "--input", tmp_path / "d.csv", "--output", tmp_path / "q.json") == 2
        assert "error[below-threshold-level]" in capsys.readouterr().err


def verify_doc(copula, checks=None, n=20_000):
    doc = {
        "seed": 3,
        "generator": {"family": "scaled_copula", "dim": 2, "copula": {"family": "gumbel", "theta": 2.0}},
        "copula": copula,
        "pt": {"threshold": [0.8, 0.8]},
        "verify": {"n": n, "n_norm": n},
    }
    if checks is not None:
        doc["verify"]["checks"] = checks
    return doc


class TestVerify:
    def test_self_consistent_gpd_exit_zero(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", verify_doc({"family": "gpd"}))
        out = tmp_path / "r.json"
        assert run_cli("verify", "--config", p, "--output", out, "--quiet") == 0
        doc = json.loads(out.read_text())
        assert doc["passed"] and {r["name"] for r in doc["reports"]} >= {"upper_tail", "pot_conditional"}

    def test_example_config(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli("verify", "--config", CONFIGS / "verify.yaml", "--output", out, "--quiet") == 0

    def test_failed_check_returns_one(self, tmp_path, monkeypatch):
        from ptcopula import cli
        from ptcopula.copulas import IndependenceCopula

        class Mislabelled(IndependenceCopula):
            def sample(self, rng, n):
                u = rng.random((n, 1))
                return np.hstack([u, u])

        monkeypatch.setattr(cli, "build_copula", lambda sec, gen=None, gpd_sec=None: Mislabelled(2))
        p = write_yaml(tmp_path / "c.yaml", verify_doc({"family": "independence"}, ["lower_region"]))
        out = tmp_path / "r.json"
        assert run_cli("verify", "--config", p, "--output", out, "--quiet") == 1
        assert json.loads(out.read_text())["passed"] is False

    def test_adding_checks_keeps_streams(self, tmp_path):
        reports = []
        for checks in (["margins"], ["margins", "tail_copula", "upper_tail"]):
            p = write_yaml(tmp_path / "c.yaml", verify_doc({"family": "clayton", "theta": 1.0}, checks))
            out = tmp_path / "r.json"
            run_cli("verify", "--config", p, "--output", out, "--quiet")
            reports.append([r for r in json.loads(out.read_text())["reports"] if r["name"].startswith("pt_margin")])
        assert reports[0] == reports[1]

    def test_unknown_check(self, tmp_path, capsys):
        p = write_yaml(tmp_path / "c.yaml", verify_doc({"family": "gpd"}, ["bogus"]))
        assert run_cli("verify", "--config", p, "--output", tmp_path / "r.json") == 2
        assert "error[unknown-check]" in capsys.readouterr().err

    def test_check_order_is_append_only(self):
        assert CHECK_ORDER[:5] == ("margins", "upper_tail", "lower_region", "tail_copula", "pot_conditional")

    def test_functional_checks(self, tmp_path):
        doc = yaml.safe_load((CONFIGS / "functional.yaml").read_text())
        doc["verify"] = {"n": 20_000, "n_norm": 20_000}
        p = write_yaml(tmp_path / "c.yaml", doc)
        out = tmp_path / "r.json"
        assert run_cli("verify", "--config", p, "--output", out, "--quiet") == 0
        names = {r["name"] for r in json.loads(out.read_text())["reports"]}
        assert {"gpp_lower_tail", "functional_tail"} <= names


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "ptcopula.cli", "simulate", "--config", str(CONFIGS / "simulate.yaml"),
         "--output", str(out), "--quiet"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
