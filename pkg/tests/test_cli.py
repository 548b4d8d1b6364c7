import json

import numpy as np
import pytest

from gne.cli import RanksRequest, UsageError, cli_parse, main
from gne.optimizer import GneConfig
from gne.harness import make_config


def test_run_defaults():
    plan = cli_parse(["run", "--algo", "gne", "--fn", "sphere"])
    assert plan.algorithms == ["gne"] and plan.runs_per_cell == 30
    cfg = make_config("gne", 0, plan.overrides["gne"])
    assert isinstance(cfg, GneConfig) and (cfg.pop_size, cfg.max_iters) == (30, 500)
    assert [o.function_id for o in plan.objectives] == ["sphere"]


def test_shift_flag():
    plan = cli_parse(["run", "--shift", "-50", "--fn", "sphere"])
    np.testing.assert_array_equal(plan.objectives[0].shift, np.full(30, -50.0))


def test_identity_filter_flag():
    plan = cli_parse(["run", "--filter", "cheb:1,0,0"])
    filt = plan.overrides["gne"]["filter"]
    assert filt.cheb_coeffs == (1.0, 0.0, 0.0)
    assert np.all(filt(np.linspace(0, 2, 5)) == 1.0)


def test_gne_flags():
    plan = cli_parse(["run", "--sigma0", "0.5", "--sigmaT", "1e-8", "--elite-frac", "0.4",
                      "--elite-prob", "0.1", "--pop", "12", "--iters", "7"])
    cfg = make_config("gne", 0, plan.overrides["gne"])
    assert (cfg.sigma_initial, cfg.sigma_final, cfg.elite_fraction, cfg.elite_resample_prob) == (0.5, 1e-8, 0.4, 0.1)
    assert (cfg.pop_size, cfg.max_iters) == (12, 7)


def test_compare_defaults():
    plan = cli_parse(["compare"])
    assert plan.algorithms == ["gne", "de", "ga"]
    assert len(plan.objectives) == 18
    assert {o.noise for o in plan.objectives} == {"none", "uniform01"}


def test_out_paths():
    plan = cli_parse(["run", "--out", "res/x", "--format", "csv"])
    assert plan.csv_path == "res/x.csv" and plan.json_path is None


def test_ranks_request():
    req = cli_parse(["ranks", "r.csv"])
    assert isinstance(req, RanksRequest) and req.csv_path == "r.csv"


@pytest.mark.parametrize("argv", [["run", "--bogus"], ["run", "--fn", "nope"], ["run", "--algo", "pso"],
                                  ["run", "--filter", "lowpass"], ["run", "--runs", "0"], [],
                                  ["run", "--noise", "gauss"], ["run", "--filter", "cheb:0,0"]])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        cli_parse(argv)


def test_main_usage_exit_code(capsys):
    assert main(["run", "--bogus"]) == 1
    err = capsys.readouterr().err
    assert "usage:" in err


def test_main_help_exit_code(capsys):
    assert main(["--help"]) == 0


def test_main_end_to_end(tmp_path, capsys):
    out = tmp_path / "res"
    code = main(["compare", "--fn", "sphere", "--dim", "3", "--pop", "6", "--iters", "5", "--runs", "2",
                 "--out", str(out)])
    assert code == 0
    doc = json.loads((tmp_path / "res.json").read_text())
    assert set(doc["results"]) == {"none", "uniform01"}
    assert main(["ranks", str(tmp_path / "res.csv"), "--out", str(tmp_path / "re.json")]) == 0
    again = json.loads((tmp_path / "re.json").read_text())
    assert again["friedman"]["none"]["mean_ranks"] == doc["friedman"]["none"]["mean_ranks"]
    assert "friedman mean ranks" in capsys.readouterr().out


def test_main_missing_csv():
    assert main(["ranks", "/nonexistent/file.csv"]) == 1


def test_main_partial_failure(monkeypatch):
    from gne import harness

    def boom(config, obj):
        raise RuntimeError("bad")

    monkeypatch.setitem(harness.ALGORITHMS, "ga", (harness.ALGORITHMS["ga"][0], boom))
    code = main(["compare", "--fn", "sphere", "--dim", "2", "--pop", "4", "--iters", "2", "--runs", "1",
                 "--noise", "none"])
    assert code == 2
