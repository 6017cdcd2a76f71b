import json

import pandas as pd
import pytest

from gas_forecast import VERSION
from gas_forecast.cli.cli import RunConfig, last_full_year, main
from gas_forecast.common.errors import InvalidConfigError
from gas_forecast.datagen import GeneratorConfig


@pytest.fixture
def generator_json(tmp_path):
    path = tmp_path / "generator.json"
    GeneratorConfig(start="2013-01-01", end="2015-12-31", seed=4).to_json(str(path))
    return str(path)


@pytest.fixture
def data_csv(tmp_path, generator_json):
    path = tmp_path / "rgd.csv"
    assert main(["generate", "--config", generator_json, "--out", str(path)]) == 0
    return str(path)


def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == VERSION


def test_generate_is_reproducible(tmp_path, generator_json, data_csv):
    again = tmp_path / "again.csv"
    assert main(["generate", "--config", generator_json, "--out", str(again)]) == 0
    with open(data_csv) as f:
        first = f.read()
    assert first.splitlines()[0] == "date,rgd,temp_forecast,temp_actual"
    assert again.read_text() == first

    reseeded = tmp_path / "reseeded.csv"
    argv = [
        "generate",
        "--config",
        generator_json,
        "--out",
        str(reseeded),
        "--seed",
        "5",
    ]
    assert main(argv) == 0
    assert reseeded.read_text() != first


def test_domain_errors_exit_with_one(tmp_path, capsys):
    missing = str(tmp_path / "missing.json")
    code = main(["generate", "--config", missing, "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "InvalidConfigError" in capsys.readouterr().err


def test_usage_errors_exit_with_two(data_csv):
    with pytest.raises(SystemExit) as e:
        main(["backtest", "--data", data_csv, "--models", "arima"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["errorprop", "--data", data_csv, "--curve", "0:1"])
    assert e.value.code == 2
    with pytest.raises(SystemExit):
        main([])


def test_features(tmp_path, data_csv, capsys):
    out = tmp_path / "features.csv"
    code = main(
        [
            "features",
            "--data",
            data_csv,
            "--dump-features",
            str(out),
            "--start",
            "2014-01-01",
        ]
    )
    assert code == 0
    assert "rows" in capsys.readouterr().out
    features = pd.read_csv(out, index_col=0)
    assert features.columns[0] == "rgd"
    assert features.index[0].startswith("2014-01")


def test_errorprop(tmp_path, data_csv, generator_json, capsys):
    code = main(
        [
            "errorprop",
            "--data",
            data_csv,
            "--sigma0",
            "13.31",
            "--curve",
            "0:4:5",
            "--validate",
            generator_json,
            "--days",
            "20000",
            "--output-dir",
            str(tmp_path / "out"),
            "--no-timestamp",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "performance_limit" in out
    assert "Monte Carlo" in out

    summary = pd.read_csv(tmp_path / "out" / "errorprop.csv")
    assert list(summary.columns) == ["quantity", "value"]
    assert "negligibility_threshold" in set(summary["quantity"])
    assert len(pd.read_csv(tmp_path / "out" / "rmse_curve.csv")) == 5
    assert (tmp_path / "out" / "rmse_curve.svg").exists()
    yearly = pd.read_csv(tmp_path / "out" / "errorprop_yearly.csv")
    assert list(yearly["period"].astype(str)) == ["2013", "2014", "2015", "all"]


def test_errorprop_without_cold_days(tmp_path, capsys):
    config = tmp_path / "warm.json"
    warm = GeneratorConfig(start="2015-01-01", end="2015-12-31", temp_mean=40.0)
    warm.to_json(str(config))
    data = tmp_path / "warm.csv"
    assert main(["generate", "--config", str(config), "--out", str(data)]) == 0

    argv = ["errorprop", "--data", str(data), "--output-dir", str(tmp_path / "out")]
    assert main(argv) == 1
    assert "NoColdDaysError" in capsys.readouterr().err


def test_diagnostics(tmp_path, data_csv):
    out = tmp_path / "out"
    argv = ["diagnostics", "--data", data_csv, "--max-lag", "30"]
    assert main(argv + ["--output-dir", str(out)]) == 0
    figures = [
        "acf",
        "periodogram",
        "scatter_rgd_temperature",
        "scatter_rgd_hdd",
        "yearly_overlay",
        "series_2015",
    ]
    for name in figures:
        assert (out / f"{name}.csv").exists()
        assert (out / f"{name}.svg").read_text().lstrip().startswith("<?xml")
    assert (out / "correlations.csv").exists()
    acf = pd.read_csv(out / "acf.csv", comment="#")
    assert len(acf) == 31

    scatter = pd.read_csv(out / "scatter_rgd_hdd.csv", comment="#")
    assert list(scatter.columns) == ["date", "hdd", "rgd"]
    assert len(scatter) == len(pd.read_csv(data_csv))
    overlay = pd.read_csv(out / "yearly_overlay.csv", comment="#")
    assert set(overlay["year"]) == {2013, 2014, 2015}
    series = pd.read_csv(out / "series_2015.csv", comment="#")
    assert list(series.columns) == ["date", "rgd", "hdd"]
    assert len(series) == 365


def test_diagnostics_series_year(tmp_path, data_csv):
    out = tmp_path / "out"
    base = ["diagnostics", "--data", data_csv, "--output-dir", str(out)]
    assert main(base + ["--year", "2014"]) == 0
    assert (out / "series_2014.svg").exists()
    assert not (out / "series_2015.svg").exists()

    assert main(base + ["--year", "2020"]) == 1


def test_last_full_year():
    index = pd.date_range("2013-03-01", "2016-06-30", freq="D")
    assert last_full_year(index) == 2015
    assert last_full_year(pd.date_range("2016-03-01", "2016-06-30", freq="D")) == 2016


def test_config_help_says_json(capsys):
    for command in ("backtest", "generate"):
        with pytest.raises(SystemExit):
            main([command, "--help"])
        assert "A JSON file holding one object" in capsys.readouterr().out


def test_non_json_run_config_is_rejected(tmp_path, capsys):
    config = tmp_path / "run.txt"
    config.write_text("models = ridge\ntest_years = 2015\n")
    assert main(["backtest", "--config", str(config)]) == 1
    assert "as JSON" in capsys.readouterr().err


def test_backtest_from_run_config(tmp_path, generator_json, capsys):
    out = tmp_path / "out"
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps(
            {
                "generator_config": generator_json,
                "output_dir": str(out),
                "models": ["ridge", "knn"],
                "test_years": [2015],
                "grids": {
                    "ridge": {"lam": [0.001, 1.0]},
                    "knn": {"k": [5, 10], "weighting": ["uniform"]},
                },
            }
        )
    )
    assert main(["backtest", "--config", str(config), "--no-timestamp"]) == 0
    assert "relative_gap" in capsys.readouterr().out

    expected = {
        "errors_actual.csv",
        "errors_forecast.csv",
        "monthly_actual.csv",
        "monthly_forecast.csv",
        "summary_actual.csv",
        "summary_forecast.csv",
        "residuals_actual.csv",
        "residuals_forecast.csv",
        "hyperparameters.csv",
        "rmse_comparison.csv",
        "residual_histograms_actual.svg",
        "residual_histograms_forecast.svg",
        "residuals_actual_2015.svg",
        "residuals_forecast_2015.svg",
        "rmse_comparison.svg",
    }
    assert {p.name for p in out.iterdir()} == expected

    comparison = pd.read_csv(out / "rmse_comparison.csv")
    assert set(comparison["model"]) == {"ridge", "knn"}
    columns = {"rmse_actual", "performance_limit", "predicted_rmse", "rmse_forecast"}
    assert columns <= set(comparison.columns)


def test_backtest_flags_override_config(tmp_path, data_csv):
    out = tmp_path / "out"
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps({"data": "elsewhere.csv", "models": ["gp"], "test_years": [2014]})
    )
    code = main(
        [
            "backtest",
            "--config",
            str(config),
            "--data",
            data_csv,
            "--models",
            "ridge",
            "--test-years",
            "2015",
            "--temperature",
            "forecast",
            "--output-dir",
            str(out),
        ]
    )
    assert code == 0
    assert not (out / "rmse_comparison.csv").exists()
    errors = pd.read_csv(out / "errors_forecast.csv", comment="#")
    assert set(errors["model"]) == {"ridge"}


def test_backtest_needs_data_and_years(tmp_path, data_csv, capsys):
    assert main(["backtest", "--test-years", "2015"]) == 1
    assert main(["backtest", "--data", data_csv]) == 1
    assert main(["backtest", "--data", data_csv, "--test-years", "2013"]) == 1
    assert "InsufficientHistoryError" in capsys.readouterr().err


def test_run_config_validation(tmp_path):
    with pytest.raises(InvalidConfigError):
        RunConfig(models=["arima"])
    with pytest.raises(InvalidConfigError):
        RunConfig(temperature="observed")
    with pytest.raises(InvalidConfigError):
        RunConfig(grids={"svm": {"c": [1.0]}})

    path = tmp_path / "run.json"
    path.write_text(json.dumps({"test_years": [2015], "learning_rate": 0.1}))
    with pytest.raises(InvalidConfigError):
        RunConfig.from_json(str(path))

    path.write_text(json.dumps({"test_years": [2015], "temperature": "actual"}))
    assert RunConfig.from_json(str(path)).sessions == ["actual"]
