from datetime import date

import numpy as np
import pandas as pd
import pytest

from gas_forecast.common.errors import (
    DataFormatError,
    EmptyMatrixError,
    MissingLagError,
    ZeroVarianceError,
)
from gas_forecast.common.functions import read_dataset, write_dataset
from gas_forecast.features import (
    BINARY_COLUMNS,
    CONTINUOUS_COLUMNS,
    FEATURE_COLUMNS,
    WEEKDAY_COLUMNS,
    DailyRecord,
    Scaler,
    build_matrix,
    build_row,
    dump_features,
    frame_to_records,
    hdd,
    read_features,
    records_to_frame,
)


def flat_dataset(start="2015-01-01", end="2016-12-31") -> pd.DataFrame:
    index = pd.date_range(start, end, freq="D", name="date")
    return pd.DataFrame(
        {"rgd": 50.0, "temp_forecast": 15.0, "temp_actual": 14.0}, index=index
    )


@pytest.mark.parametrize(
    "t, expected", [(18.0, 0.0), (25.0, 0.0), (10.0, 8.0), (-2.0, 20.0)]
)
def test_hdd(t, expected):
    assert hdd(t) == expected


def test_hdd_vectorized():
    np.testing.assert_array_equal(hdd(np.array([10.0, 20.0])), [8.0, 0.0])


def test_build_row_hand_trace():
    df = flat_dataset()
    t = date(2016, 7, 13)
    df.loc[pd.Timestamp(2016, 7, 12), "rgd"] = 100.0
    df.loc[pd.Timestamp(t), "temp_forecast"] = 8.0

    row = build_row(df, t, "forecast")
    assert list(row.index) == FEATURE_COLUMNS
    assert row["rgd_lag1"] == 100.0
    assert row["temp"] == 8.0
    assert row["hdd"] == 10.0
    assert row["temp_lag1"] == 15.0
    assert row["wd_wed"] == 1.0
    assert row[WEEKDAY_COLUMNS].sum() == 1.0


def test_build_row_reads_the_selected_temperature():
    df = flat_dataset()
    row = build_row(df, date(2016, 7, 13), "actual")
    assert row["temp"] == 14.0
    assert row["hdd"] == 4.0


def test_sunday_is_the_reference_level():
    row = build_row(flat_dataset(), date(2016, 7, 17), "forecast")
    assert row[WEEKDAY_COLUMNS].sum() == 0.0


def test_build_row_first_day_is_missing_a_lag():
    with pytest.raises(MissingLagError):
        build_row(flat_dataset(), date(2015, 1, 1), "forecast")


def test_build_row_unknown_source():
    with pytest.raises(DataFormatError):
        build_row(flat_dataset(), date(2016, 7, 13), "observed")


def test_build_matrix_in_first_week_is_empty():
    with pytest.raises(EmptyMatrixError):
        build_matrix(flat_dataset(), (date(2015, 1, 1), date(2015, 1, 7)), "forecast")


def test_build_matrix_constant_temperature_is_zero_variance(dataset):
    flat = dataset.copy()
    flat["temp_forecast"] = 10.0
    with pytest.raises(ZeroVarianceError) as excinfo:
        build_matrix(flat, (date(2013, 1, 1), date(2014, 12, 31)), "forecast")
    assert "temp" in excinfo.value.columns


def test_build_matrix_standardizes_continuous_columns(train):
    k = len(CONTINUOUS_COLUMNS)
    np.testing.assert_allclose(train.X[:, :k].mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(train.X[:, :k].std(axis=0), 1.0, atol=1e-9)
    binary = train.X[:, k:]
    assert set(np.unique(binary)) <= {0.0, 1.0}
    np.testing.assert_array_equal(binary, train.raw[BINARY_COLUMNS].to_numpy())


def test_build_matrix_rows_are_aligned(dataset, train):
    assert train.X.shape == (train.n, 21)
    assert train.dates.is_monotonic_increasing
    np.testing.assert_array_equal(train.y, dataset.loc[train.dates, "rgd"].to_numpy())
    # 2013-01-01 needs sim(2012-12-31), which lies in 2011
    assert train.dates[0] == pd.Timestamp(2013, 1, 2)


def test_test_matrix_reuses_training_scaler(train, test_matrix):
    assert test_matrix.scaler is train.scaler
    np.testing.assert_allclose(
        train.scaler.inverse_transform(test_matrix.X), test_matrix.raw.to_numpy()
    )


def test_scaler_uses_population_moments(train):
    continuous = train.raw[CONTINUOUS_COLUMNS].to_numpy()
    np.testing.assert_allclose(train.scaler.mean, continuous.mean(axis=0))
    np.testing.assert_allclose(train.scaler.std, continuous.std(axis=0))
    assert train.scaler.y_mean == pytest.approx(train.y.mean())
    assert train.scaler.y_std == pytest.approx(train.y.std())
    np.testing.assert_allclose(
        train.scaler.unscale_target(train.scaler.scale_target(train.y)), train.y
    )


def test_scaler_keeps_a_constant_target_unscaled(train):
    raw = train.raw.to_numpy()
    scaler = Scaler.fit(raw, np.full(train.n, 30.0))
    assert scaler.y_std == 1.0
    np.testing.assert_array_equal(scaler.scale_target([31.0, 29.0]), [1.0, -1.0])


def test_scaler_rebuilt_from_dict_transforms_identically(train, test_matrix):
    rebuilt = Scaler.from_dict(train.scaler.to_dict())
    raw = test_matrix.raw.to_numpy()
    np.testing.assert_allclose(rebuilt.transform(raw), test_matrix.X)
    np.testing.assert_allclose(
        rebuilt.scale_target(test_matrix.y), train.scaler.scale_target(test_matrix.y)
    )

def test_dump_and_read_features(tmp_path, test_matrix):
    path = tmp_path / "features.csv"
    dump_features(test_matrix, str(path))
    df = read_features(str(path))
    np.testing.assert_array_equal(
        df[FEATURE_COLUMNS].to_numpy(), test_matrix.raw.to_numpy()
    )
    np.testing.assert_array_equal(df["rgd"].to_numpy(), test_matrix.y)


def test_records_convert_to_frame():
    records = [
        DailyRecord(date(2016, 1, 2), 40.0, 5.0, 4.5),
        DailyRecord(date(2016, 1, 1), 42.0, 6.0, 6.5),
    ]
    df = records_to_frame(records)
    assert list(df.columns) == ["rgd", "temp_forecast", "temp_actual"]
    assert df.index[0] == pd.Timestamp(2016, 1, 1)
    assert frame_to_records(df) == sorted(records, key=lambda r: r.date)


def test_dataset_csv_is_written_and_read_back(tmp_path, dataset):
    path = tmp_path / "rgd.csv"
    write_dataset(dataset, str(path))
    pd.testing.assert_frame_equal(read_dataset(str(path)), dataset, check_freq=False)


@pytest.mark.parametrize(
    "content",
    [
        "date,rgd,temp_forecast\n2016-01-01,40,5\n2016-01-01,41,6\n",
        "date,rgd,temp_forecast\n2016/01/01,40,5\n",
        "date,rgd,temp_forecast\n2016-01-01,abc,5\n",
        "date,rgd,temp_forecast,wind\n2016-01-01,40,5,3\n",
        "date,rgd\n2016-01-01,40\n",
        "date,rgd,temp_forecast\n2016-01-01,-1,5\n",
    ],
)
def test_malformed_dataset_is_rejected(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(DataFormatError):
        read_dataset(str(path))
