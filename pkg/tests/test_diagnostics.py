import numpy as np
import pandas as pd
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gas_forecast.common.errors import ConstantSeriesError, LengthMismatchError
from gas_forecast.metrics import (
    autocorrelation,
    correlation_summary,
    demand_temperature_table,
    lag1_correlation_excluding_weekend_transitions,
    lag_correlation,
    pearson,
    periodogram,
    similar_day_difference_correlation,
    weekday_shift,
    year_series,
    yearly_overlay,
)
from gas_forecast.metrics.plots import (
    scatter_rgd_hdd,
    scatter_rgd_temperature,
    series_plot,
    yearly_overlay_figure,
)


def biased_acf(x: np.ndarray, lag: int) -> float:
    d = x - x.mean()
    return float(np.sum(d[: len(d) - lag] * d[lag:]) / np.sum(d * d))


def test_autocorrelation_of_alternating_series():
    acf = autocorrelation(np.tile([1.0, -1.0], 50), 2)
    assert acf[0] == 1.0
    assert acf[1] == pytest.approx(-0.99)
    assert acf[2] == pytest.approx(0.98)


def test_autocorrelation_matches_the_biased_estimator():
    x = np.random.default_rng(3).normal(size=257).cumsum()
    acf = autocorrelation(x, 40)
    assert list(acf.index) == list(range(41))
    expected = [biased_acf(x, lag) for lag in range(41)]
    np.testing.assert_allclose(acf.to_numpy(), expected, atol=1e-10)


def test_autocorrelation_errors():
    with pytest.raises(ConstantSeriesError):
        autocorrelation(np.ones(10), 3)
    with pytest.raises(LengthMismatchError):
        autocorrelation(np.arange(5.0), 5)


def test_weekly_autocorrelation_of_demand(dataset):
    acf = autocorrelation(dataset["rgd"].to_numpy(), 400)
    assert acf[7] > acf[3]
    assert acf[365] > acf[180]


def test_periodogram_finds_the_period():
    n = 700
    x = np.sin(2 * np.pi * np.arange(n) / 7.0)
    spectrum = periodogram(x)
    assert spectrum.loc[spectrum["power"].idxmax(), "period"] == pytest.approx(7.0)
    assert spectrum["frequency_index"].iloc[0] == 1
    assert spectrum["frequency_index"].iloc[-1] == n // 2


@pytest.mark.parametrize("n", [364, 365])
def test_periodogram_powers_add_up_to_the_variance(n):
    x = np.random.default_rng(n).normal(5.0, 2.0, size=n)
    spectrum = periodogram(x)
    assert len(spectrum) == n // 2
    assert spectrum["power"].sum() == pytest.approx(np.var(x), rel=1e-10)
    np.testing.assert_allclose(
        spectrum["period"], n / spectrum["frequency_index"], rtol=1e-12
    )


def test_pearson():
    assert pearson([1.0, 2.0, 3.0], [2.0, 4.0, 6.5]) == pytest.approx(
        0.9979487, abs=1e-6
    )
    with pytest.raises(ConstantSeriesError):
        pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(LengthMismatchError):
        pearson([1.0, 2.0, 3.0], [1.0, 2.0])


@given(
    st.integers(min_value=0, max_value=10_000),
    st.floats(min_value=-100.0, max_value=100.0),
    st.floats(min_value=-100.0, max_value=100.0),
)
def test_pearson_ignores_affine_rescaling(seed, a, b):
    assume(abs(a) > 1e-3)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=30)
    y = x + rng.normal(size=30)
    assert pearson(a * x + b, y) == pytest.approx(
        np.sign(a) * pearson(x, y), abs=1e-9
    )


def test_lag_correlations(dataset):
    rgd = dataset["rgd"]
    assert lag_correlation(rgd, 1) > 0.5
    assert (
        lag1_correlation_excluding_weekend_transitions(rgd)
        > lag_correlation(rgd, 1) - 0.05
    )
    assert -1.0 <= similar_day_difference_correlation(rgd) <= 1.0


def test_correlation_summary(dataset):
    summary = correlation_summary(dataset)
    assert list(summary.columns) == ["statistic", "value"]
    assert summary["value"].between(-1.0, 1.0).all()
    values = summary.set_index("statistic")["value"]
    assert values["rgd_vs_hdd"] > 0.9
    assert values["rgd_vs_temperature"] < -0.7


def test_demand_temperature_table(dataset):
    table = demand_temperature_table(dataset)
    assert list(table.columns) == ["date", "temperature", "hdd", "rgd"]
    assert len(table) == len(dataset)
    assert table["date"].iloc[0] == "2012-01-01"
    np.testing.assert_allclose(
        table["hdd"], np.maximum(18.0 - table["temperature"], 0.0)
    )


def test_demand_temperature_table_falls_back_to_forecast_temperature(dataset):
    table = demand_temperature_table(dataset.drop(columns="temp_actual"))
    np.testing.assert_allclose(table["temperature"], dataset["temp_forecast"])


@pytest.mark.parametrize(
    "year, reference, expected",
    [(2017, 2017, 0), (2016, 2017, -2), (2015, 2017, -3), (2014, 2017, 3)],
)
def test_weekday_shift(year, reference, expected):
    assert weekday_shift(year, reference) == expected


def test_yearly_overlay_lines_up_weekdays(dataset):
    overlay = yearly_overlay(dataset["rgd"])
    assert list(overlay.columns) == ["year", "aligned_day", "date", "rgd"]
    assert set(overlay["year"]) == {2012, 2013, 2014, 2015}
    reference = overlay[overlay["year"] == 2015]
    assert list(reference["aligned_day"]) == list(range(1, 366))

    weekdays = pd.to_datetime(overlay["date"]).dt.weekday
    assert (weekdays.groupby(overlay["aligned_day"]).nunique() == 1).all()


def test_yearly_overlay_of_an_empty_series():
    with pytest.raises(LengthMismatchError):
        yearly_overlay(pd.Series([], index=pd.DatetimeIndex([]), dtype=float))


def test_year_series(dataset):
    table = year_series(dataset, 2012)
    assert list(table.columns) == ["date", "rgd", "hdd"]
    assert len(table) == 366
    assert table["date"].iloc[-1] == "2012-12-31"
    with pytest.raises(LengthMismatchError):
        year_series(dataset, 2020)


def test_exploratory_figures_are_svg(dataset, tmp_path):
    table = demand_temperature_table(dataset)
    overlay = yearly_overlay(dataset["rgd"])
    paths = {
        name: str(tmp_path / f"{name}.svg")
        for name in ("temperature", "hdd", "overlay", "series")
    }
    scatter_rgd_temperature(table, paths["temperature"])
    scatter_rgd_hdd(table, paths["hdd"])
    yearly_overlay_figure(overlay, paths["overlay"])
    series_plot(year_series(dataset, 2015), paths["series"], 2015)

    for path in paths.values():
        with open(path) as f:
            text = f.read()
        assert text.startswith("<?xml")
        assert "<svg" in text


def test_figures_are_reproducible(dataset, tmp_path):
    table = demand_temperature_table(dataset.loc["2015"])
    first, second = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
    scatter_rgd_hdd(table, first)
    scatter_rgd_hdd(table, second)
    with open(first) as a, open(second) as b:
        assert a.read() == b.read()
