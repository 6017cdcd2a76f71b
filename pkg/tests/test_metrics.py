import numpy as np
import pandas as pd
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gas_forecast.common.errors import (
    LengthMismatchError,
    ZeroRMSEError,
    ZeroTargetError,
)
from gas_forecast.metrics import (
    EvaluationReport,
    ModelEvaluation,
    cold_months_mape,
    gaussian_reference,
    mae,
    mae_rmse_ratio,
    mape,
    monthly_breakdown,
    rmse,
)


def series(values, start="2016-01-01") -> pd.Series:
    index = pd.date_range(start, periods=len(values), freq="D")
    return pd.Series(values, index=index, dtype=float)


def test_error_metrics_by_hand():
    actual = [10.0, 20.0, 40.0]
    predicted = [12.0, 18.0, 40.0]
    assert mae(actual, predicted) == pytest.approx(4.0 / 3.0)
    assert mape(actual, predicted) == pytest.approx(100.0 * (0.2 + 0.1) / 3.0)
    assert rmse(actual, predicted) == pytest.approx(np.sqrt(8.0 / 3.0))


def test_metric_errors():
    with pytest.raises(LengthMismatchError):
        mae([1.0, 2.0], [1.0])
    with pytest.raises(LengthMismatchError):
        rmse([], [])
    with pytest.raises(ZeroTargetError):
        mape([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(ZeroRMSEError):
        mae_rmse_ratio([0.0, 0.0])


def test_mae_rmse_ratio():
    assert gaussian_reference() == pytest.approx(0.7978845608)
    assert mae_rmse_ratio([1.0, -1.0, 1.0]) == pytest.approx(1.0)
    assert mae_rmse_ratio([0.0, 0.0, 0.0, 4.0]) == pytest.approx(0.5)
    residuals = np.random.default_rng(0).normal(size=200000)
    assert mae_rmse_ratio(residuals) == pytest.approx(gaussian_reference(), abs=5e-3)


@settings(max_examples=1000)
@given(
    st.lists(
        st.floats(min_value=-1e3, max_value=1e3, allow_nan=False),
        min_size=1,
        max_size=50,
    )
)
def test_mae_never_exceeds_rmse(residuals):
    assume(any(abs(r) > 1e-6 for r in residuals))
    ratio = mae_rmse_ratio(residuals)
    assert 0.0 < ratio <= 1.0 + 1e-12


def test_heavy_tails_lower_the_ratio():
    rng = np.random.default_rng(0)
    n = 200_000
    # Gaussian mixture: 90% with sigma 1, 10% with sigma 5
    wide = rng.random(n) < 0.1
    residuals = np.where(wide, rng.normal(0.0, 5.0, n), rng.normal(0.0, 1.0, n))
    assert mae_rmse_ratio(residuals) < gaussian_reference()


def test_monthly_breakdown_pools_years():
    actual = pd.Series(
        [10.0, 10.0, 20.0],
        index=pd.DatetimeIndex(["2015-01-10", "2016-01-10", "2016-02-10"]),
    )
    table = monthly_breakdown(actual, [11.0, 9.0, 20.0])
    assert list(table.index) == [1, 2]
    assert table.loc[1, "mae"] == pytest.approx(1.0)
    assert table.loc[1, "mape"] == pytest.approx(10.0)
    assert table.loc[1, "days"] == 2
    assert table.loc[2, "mae"] == 0.0


def test_monthly_breakdown_separates_winter_from_summer():
    actual = series(np.full(366, 50.0))
    months = pd.DatetimeIndex(actual.index).month
    # Every January error is 2, every July error is 1, everything else 0
    errors = np.select([months == 1, months == 7], [2.0, -1.0], 0.0)
    predicted = actual.to_numpy() + errors
    table = monthly_breakdown(actual, predicted)

    assert list(table.index) == list(range(1, 13))
    assert table.loc[1, "days"] == 31
    assert table.loc[1, "mae"] == 2.0 * table.loc[7, "mae"]
    assert table.loc[7, "mae"] == 1.0
    assert table.loc[1, "mape"] == pytest.approx(4.0)
    assert table.loc[1, "mape"] == pytest.approx(2.0 * table.loc[7, "mape"])
    assert table.loc[3, "mae"] == 0.0


def test_cold_months_mape_ignores_summer():
    actual = pd.Series(
        [10.0, 10.0], index=pd.DatetimeIndex(["2016-01-10", "2016-07-10"])
    )
    assert cold_months_mape(actual, [11.0, 50.0]) == pytest.approx(10.0)


def test_evaluation_report_tables():
    report = EvaluationReport(
        session="forecast",
        evaluations=[
            ModelEvaluation(
                "ridge", "forecast", 2016, series([10.0, 20.0]), np.array([11.0, 18.0])
            ),
            ModelEvaluation(
                "ridge",
                "forecast",
                2017,
                series([10.0], "2017-01-01"),
                np.array([10.0]),
            ),
            ModelEvaluation(
                "knn", "forecast", 2016, series([10.0, 20.0]), np.array([10.0, 21.0])
            ),
        ],
    )
    assert report.models == ["ridge", "knn"]

    yearly = report.yearly_table()
    assert list(yearly.columns) == ["session", "model", "year", "mae", "mape", "rmse"]
    ridge_all = yearly[(yearly["model"] == "ridge") & (yearly["year"] == "all")].iloc[0]
    assert ridge_all["mae"] == pytest.approx(1.0)
    assert ridge_all["rmse"] == pytest.approx(np.sqrt(5.0 / 3.0))
    assert len(yearly) == 5

    np.testing.assert_allclose(report.residuals("ridge").to_numpy(), [-1.0, 2.0, 0.0])
    monthly = report.monthly_table()
    assert set(monthly["model"]) == {"ridge", "knn"}

    summary = report.summary_table().set_index("model")
    assert summary.loc["ridge", "cold_months_mape"] == pytest.approx(
        100.0 * (0.1 + 0.1 + 0.0) / 3.0
    )

    with pytest.raises(LengthMismatchError):
        report.pooled("gp")
