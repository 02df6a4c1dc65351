import json

import numpy as np
import pytest

from entropyrisk import cli
from entropyrisk.ingest import PriceSeries, write_prices_wide
from entropyrisk.mutinfo import (global_correlation, mutual_information_adaptive,
                                 mutual_information_grid)
from entropyrisk.report import RunConfig, round_sig, run_full_report
from entropyrisk.synth import synthetic_dates, to_prices

from conftest import gen

FILES = ["report.json", "fig1.csv", "fig2.csv", "diagnostics.csv", "diversification.csv"]


@pytest.fixture(scope="module")
def prices_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "prices.csv"
    universe = gen("one_factor_universe", 400, 21, n_assets=4, beta=[0.5, 1.0, 1.5, 2.0])
    write_prices_wide(path, [to_prices(r) for r in universe])
    return path


def bundle(d):
    return {f: (d / f).read_bytes() for f in FILES}


def test_analyze_writes_bundle_deterministically(prices_csv, tmp_path, capsys):
    argv = ["analyze", "--input", str(prices_csv), "--benchmark", "MKT", "--replications", "5"]
    assert cli.main(argv + ["--output", str(tmp_path / "a")]) == 0
    assert cli.main(argv + ["--output", str(tmp_path / "b"), "--workers", "3"]) == 0
    a, b = bundle(tmp_path / "a"), bundle(tmp_path / "b")
    assert a == b
    report = json.loads(a["report.json"])
    assert [t["ticker"] for t in report["tickers"]] == ["A01", "A02", "A03", "A04"]
    for t in report["tickers"]:
        assert t["lambda_normal"] == pytest.approx(abs(t["fit"]["r"]), abs=1e-9)
        assert t["status"] == "ok" and set(t["stability"]) == {"CUSUM", "CUSUM_Q"}
    assert a["fig1.csv"].decode().splitlines()[0] == "ticker,ln_sigma,h_empirical,h_normal"


def test_report_consistency(prices_csv, tmp_path):
    report = run_full_report(RunConfig(str(prices_csv), "MKT", output=str(tmp_path),
                                       diversify=False))
    assert report["n_failed"] == 0
    assert not (tmp_path / "diversification.csv").exists()
    for t in report["tickers"]:
        assert t["h_conditional"] == pytest.approx(t["h_grid"] - t["mi_grid"], abs=1e-12)


def test_missing_benchmark_writes_nothing(prices_csv, tmp_path, capsys):
    out = tmp_path / "out"
    rc = cli.main(["analyze", "--input", str(prices_csv), "--benchmark", "NOPE",
                   "--output", str(out)])
    assert rc == 2 and not out.exists()
    assert "NOPE" in capsys.readouterr().err


def test_help_and_usage(capsys):
    assert cli.main(["--help"]) == 0
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["analyze", "--input", "x.csv"]) == 2


def test_missing_file_is_runtime_error(tmp_path):
    assert cli.main(["entropy", "--input", str(tmp_path / "none.csv")]) == 1


def test_failed_ticker_is_reported(tmp_path):
    n = 200
    dates = synthetic_dates(n + 1)
    m = gen("gaussian", n, 3, sigma=0.01)[0]
    good = gen("gaussian", n, 4, sigma=0.01)[0]
    series = [to_prices(m), to_prices(good), PriceSeries("FLAT", dates, np.full(n + 1, 50.0))]
    series[0] = PriceSeries("MKT", series[0].dates, series[0].prices)
    series[1] = PriceSeries("GOOD", series[1].dates, series[1].prices)
    path = tmp_path / "p.csv"
    write_prices_wide(path, series)
    rep = run_full_report(RunConfig(str(path), "MKT", output=str(tmp_path / "o"),
                                    diversify=False))
    status = {t["ticker"]: t.get("status", "ok") for t in rep["tickers"]}
    assert status == {"FLAT": "failed", "GOOD": "ok"} and rep["n_failed"] == 1
    fig1 = (tmp_path / "o" / "fig1.csv").read_text().splitlines()
    assert len(fig1) == 2 and fig1[1].startswith("GOOD,")


def test_config_file_and_precedence(prices_csv, tmp_path):
    conf = tmp_path / "run.toml"
    conf.write_text(f'[run]\ninput = "{prices_csv}"\nbenchmark = "MKT"\nseed = 4\n'
                    f'output = "{tmp_path / "from_file"}"\n'
                    '[diversification]\nenabled = false\n'
                    '[adaptive]\nmin_count = 32\n')
    cfg = cli.read_config(conf)
    assert cfg["seed"] == 4 and cfg["diversify"] is False and cfg["adaptive_min_count"] == 32
    assert cli.main(["analyze", "--config", str(conf), "--seed", "9",
                     "--output", str(tmp_path / "flag")]) == 0
    rep = json.loads((tmp_path / "flag" / "report.json").read_text())
    assert rep["config"]["seed"] == 9 and rep["config"]["adaptive_min_count"] == 32
    assert not (tmp_path / "from_file").exists()


def test_bad_config_value(tmp_path):
    conf = tmp_path / "c.ini"
    conf.write_text("[adaptive]\nmin_count = lots\n")
    assert cli.main(["analyze", "--config", str(conf)]) == 2


def test_mi_matches_library(prices_csv, tmp_path, capsys):
    tree_path = tmp_path / "tree.json"
    assert cli.main(["mi", "--input", str(prices_csv), "--cols", "A02,MKT",
                     "--tree", str(tree_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    from entropyrisk.ingest import load_prices, log_returns
    prices = {p.ticker: p for p in load_prices(prices_csv)}
    x, y = log_returns(prices["A02"]), log_returns(prices["MKT"])
    est, tree = mutual_information_adaptive(x, y)
    assert out["I"] == round_sig(est.value)
    assert out["lambda"] == round_sig(global_correlation(est))
    assert out["I_grid"] == round_sig(mutual_information_grid(x, y).value)
    dumped = json.loads(tree_path.read_text())
    assert dumped == json.loads(json.dumps(tree.to_dict()))


def test_other_subcommands(prices_csv, tmp_path, capsys):
    base = ["--input", str(prices_csv)]
    assert cli.main(["entropy", *base, "--cols", "MKT"]) == 0
    ent = json.loads(capsys.readouterr().out)
    assert set(ent) == {"MKT"} and ent["MKT"]["n"] == 400
    assert cli.main(["market-model", *base, "--cols", "A04,MKT"]) == 0
    mm = json.loads(capsys.readouterr().out)
    assert mm["beta"] == pytest.approx(2.0, abs=0.3)
    assert cli.main(["diagnostics", *base, "--cols", "A01,MKT"]) == 0
    assert "jarque_bera" in capsys.readouterr().out
    div = tmp_path / "div.csv"
    assert cli.main(["diversify", *base, "--exclude", "MKT", "--replications", "3",
                     "--output", str(div)]) == 0
    assert len(div.read_text().splitlines()) == 5


def test_synth_roundtrip(tmp_path):
    path = tmp_path / "s.csv"
    assert cli.main(["synth", "--kind", "bivariate_gaussian", "--n", "300", "--seed", "2",
                     "--param", "rho=0.5", "--output", str(path)]) == 0
    from entropyrisk.ingest import load_prices, log_returns
    loaded = {p.ticker: log_returns(p).values for p in load_prices(path)}
    x, y = gen("bivariate_gaussian", 300, 2, rho=0.5)
    np.testing.assert_allclose(loaded["X"], x.values, atol=1e-12)
    assert cli.main(["synth", "--kind", "gaussian", "--n", "10", "--param", "oops"]) == 2


def test_dump_paths(prices_csv, tmp_path):
    assert cli.main(["analyze", "--input", str(prices_csv), "--benchmark", "MKT",
                     "--no-diversify", "--dump-paths", "--output", str(tmp_path)]) == 0
    rows = (tmp_path / "stability_A01.csv").read_text().splitlines()
    # 400 returns -> 398 recursive residuals -> 399 path points plus header
    assert rows[0].startswith("t,cusum,") and len(rows) == 400
