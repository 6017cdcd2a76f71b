"""
This file turns raw daily records into the 21-covariate design matrix used by the forecasters

Example Usage:
```
dataset = read_dataset("rgd.csv")
train = build_matrix(dataset, (date(2008, 1, 1), date(2014, 12, 31)), "forecast")
test = build_matrix(
    dataset, (date(2015, 1, 1), date(2015, 12, 31)), "forecast", scaler=train.scaler
)
```
"""

# Standard Library Imports
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Dict, Iterable, List, Optional, Tuple, Union

# Non-Standard Imports
import numpy as np
import pandas as pd
from sklearn.preprocessing import StandardScaler

# Local Imports
from gas_forecast.calendar import (
    HolidayCalendar,
    ITALIAN_CALENDAR,
    is_bridge_holiday,
    is_day_after_holiday,
    is_holiday,
    similar_day,
)
from gas_forecast.common.errors import (
    DataFormatError,
    EmptyMatrixError,
    MissingLagError,
    ZeroVarianceError,
)
from gas_forecast.common.functions import ensure_parent_dir, validate_dataset
from gas_forecast.common.log import log
from gas_forecast.common.types import TemperatureSource

# Heating threshold in degrees Celsius
HDD_BASE: float = 18.0

RGD_COLUMNS: List[str] = ["rgd_lag1", "rgd_lag7", "rgd_sim", "rgd_sim_lag1"]
TEMP_COLUMNS: List[str] = ["temp", "temp_lag1", "temp_lag7", "temp_sim"]
HDD_COLUMNS: List[str] = ["hdd", "hdd_lag1", "hdd_lag7", "hdd_sim"]
# Sunday is the dropped reference level
WEEKDAY_COLUMNS: List[str] = [
    "wd_mon",
    "wd_tue",
    "wd_wed",
    "wd_thu",
    "wd_fri",
    "wd_sat",
]
FLAG_COLUMNS: List[str] = ["holiday", "day_after_holiday", "bridge_holiday"]

CONTINUOUS_COLUMNS: List[str] = RGD_COLUMNS + TEMP_COLUMNS + HDD_COLUMNS
BINARY_COLUMNS: List[str] = WEEKDAY_COLUMNS + FLAG_COLUMNS
FEATURE_COLUMNS: List[str] = CONTINUOUS_COLUMNS + BINARY_COLUMNS

TEMPERATURE_COLUMNS: Dict[str, str] = {
    "actual": "temp_actual",
    "forecast": "temp_forecast",
}


@dataclass(frozen=True)
class DailyRecord:
    """One calendar day of the dataset"""

    date: date
    rgd: float
    temp_forecast: float
    temp_actual: Optional[float] = None


def records_to_frame(records: Iterable[DailyRecord]) -> pd.DataFrame:
    """
    Converts daily records into a validated dataset frame
    :param records: The records, in any order
    :return: A date-indexed dataset frame
    """
    rows: List[DailyRecord] = sorted(records, key=lambda r: r.date)
    data: Dict[str, list] = {
        "rgd": [r.rgd for r in rows],
        "temp_forecast": [r.temp_forecast for r in rows],
    }
    if rows and all(r.temp_actual is not None for r in rows):
        data["temp_actual"] = [r.temp_actual for r in rows]

    df: pd.DataFrame = pd.DataFrame(
        data=data, index=pd.DatetimeIndex([r.date for r in rows], name="date")
    )
    return validate_dataset(df)


def frame_to_records(df: pd.DataFrame) -> List[DailyRecord]:
    """
    Converts a dataset frame into a list of daily records
    :param df: A date-indexed dataset frame
    :return: The records in date order
    """
    has_actual: bool = "temp_actual" in df.columns
    return [
        DailyRecord(
            date=ts.date(),
            rgd=float(row.rgd),
            temp_forecast=float(row.temp_forecast),
            temp_actual=float(row.temp_actual) if has_actual else None,
        )
        for ts, row in zip(df.index, df.itertuples(index=False))
    ]


def hdd(temperature: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Heating degree days, max(18 - T, 0)
    :param temperature: A temperature in Celsius, or an array of them
    :return: The HDD value(s)
    """
    result = np.maximum(HDD_BASE - np.asarray(temperature, dtype=float), 0.0)
    return float(result) if np.ndim(result) == 0 else result


def temperature_series(
    dataset: pd.DataFrame, temperature_source: TemperatureSource
) -> pd.Series:
    """
    Selects the temperature column of a dataset for a source
    :param dataset: A date-indexed dataset frame
    :param temperature_source: "actual" or "forecast"
    :return: The date-indexed temperature series
    """
    try:
        column: str = TEMPERATURE_COLUMNS[temperature_source]
    except KeyError:
        raise DataFormatError(
            f"Unknown temperature source '{temperature_source}', "
            f"must be one of {sorted(TEMPERATURE_COLUMNS)}"
        ) from None

    if column not in dataset.columns:
        raise DataFormatError(
            f"Dataset has no '{column}' column for the '{temperature_source}' session"
        )
    return dataset[column]


class DatasetView:
    """
    Date-keyed lookups over a dataset, built once and shared by every row assembly
    """

    def __init__(self, dataset: pd.DataFrame, temperature_source: TemperatureSource):
        dates: List[date] = [ts.date() for ts in dataset.index]
        self.source: TemperatureSource = temperature_source
        temperature: pd.Series = temperature_series(dataset, temperature_source)
        self.rgd: Dict[date, float] = dict(
            zip(dates, dataset["rgd"].to_numpy(dtype=float))
        )
        self.temp: Dict[date, float] = dict(
            zip(dates, temperature.to_numpy(dtype=float))
        )

    def require(self, table: Dict[date, float], day: date, t: date) -> float:
        try:
            return table[day]
        except KeyError:
            raise MissingLagError(day, t) from None


def _assemble(view: DatasetView, t: date, cal: HolidayCalendar) -> np.ndarray:
    one: timedelta = timedelta(days=1)
    week: timedelta = timedelta(days=7)

    sim_t: date = similar_day(t, cal)
    sim_t1: date = similar_day(t - one, cal)

    rgd: List[float] = [
        view.require(view.rgd, t - one, t),
        view.require(view.rgd, t - week, t),
        view.require(view.rgd, sim_t, t),
        view.require(view.rgd, sim_t1, t),
    ]
    temp: List[float] = [
        view.require(view.temp, t, t),
        view.require(view.temp, t - one, t),
        view.require(view.temp, t - week, t),
        view.require(view.temp, sim_t, t),
    ]
    weekdays: List[float] = [1.0 if t.weekday() == i else 0.0 for i in range(6)]
    flags: List[float] = [
        float(is_holiday(t, cal)),
        float(is_day_after_holiday(t, cal)),
        float(is_bridge_holiday(t, cal)),
    ]
    heating: List[float] = list(hdd(np.array(temp)))
    return np.array(rgd + temp + heating + weekdays + flags, dtype=float)


def build_row(
    dataset: Union[pd.DataFrame, DatasetView],
    t: date,
    temperature_source: TemperatureSource = "forecast",
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> pd.Series:
    """
    Builds the feature vector of day t: demand lags at t-1, t-7, sim(t), sim(t-1), temperature and HDD at t, t-1, t-7,
    sim(t), weekday dummies and the holiday flags
    :param dataset: A dataset frame, or a DatasetView over one
    :param t: The forecast day
    :param temperature_source: Which temperature column feeds the temperature features
    :param cal: The holiday calendar
    :return: A pandas series indexed by FEATURE_COLUMNS
    """
    view: DatasetView = (
        dataset
        if isinstance(dataset, DatasetView)
        else DatasetView(dataset, temperature_source)
    )
    return pd.Series(
        _assemble(view, t, cal), index=FEATURE_COLUMNS, name=pd.Timestamp(t)
    )


def _restore(mean, scale) -> StandardScaler:
    # Rebuilds a fitted StandardScaler from its persisted moments
    scaler: StandardScaler = StandardScaler()
    scaler.mean_ = np.asarray(mean, dtype=float)
    scaler.scale_ = np.asarray(scale, dtype=float)
    scaler.var_ = scaler.scale_**2
    scaler.n_features_in_ = scaler.mean_.shape[0]
    scaler.n_samples_seen_ = 0
    return scaler


@dataclass(frozen=True, eq=False)
class Scaler:
    """
    Standardization of the continuous feature columns, plus the target standardization
    used by the models that scale y. Binary columns pass through unchanged
    """

    features: StandardScaler
    target: StandardScaler

    @classmethod
    def fit(cls, raw: np.ndarray, y: np.ndarray) -> "Scaler":
        """
        Fits the scaler on training rows
        :param raw: n x 21 unstandardized feature array
        :param y: Training targets in MSCM
        :return: The fitted scaler
        """
        continuous: np.ndarray = raw[:, : len(CONTINUOUS_COLUMNS)]
        features: StandardScaler = StandardScaler().fit(continuous)

        spread: np.ndarray = np.sqrt(features.var_)
        flat: np.ndarray = spread <= 1e-12 * np.maximum(1.0, np.abs(features.mean_))
        if flat.any():
            raise ZeroVarianceError(np.array(CONTINUOUS_COLUMNS)[flat])

        # A constant target keeps scale_ = 1
        target: StandardScaler = StandardScaler().fit(
            np.asarray(y, dtype=float).reshape(-1, 1)
        )
        return cls(features=features, target=target)

    @property
    def mean(self) -> np.ndarray:
        return self.features.mean_

    @property
    def std(self) -> np.ndarray:
        return self.features.scale_

    @property
    def y_mean(self) -> float:
        return float(self.target.mean_[0])

    @property
    def y_std(self) -> float:
        return float(self.target.scale_[0])

    def transform(self, raw: np.ndarray) -> np.ndarray:
        out: np.ndarray = np.array(raw, dtype=float, copy=True)
        k: int = len(CONTINUOUS_COLUMNS)
        out[:, :k] = self.features.transform(out[:, :k])
        return out

    def inverse_transform(self, X: np.ndarray) -> np.ndarray:
        out: np.ndarray = np.array(X, dtype=float, copy=True)
        k: int = len(CONTINUOUS_COLUMNS)
        out[:, :k] = self.features.inverse_transform(out[:, :k])
        return out

    def scale_target(self, y: np.ndarray) -> np.ndarray:
        column: np.ndarray = np.asarray(y, dtype=float).reshape(-1, 1)
        return self.target.transform(column).ravel()

    def unscale_target(self, z: np.ndarray) -> np.ndarray:
        column: np.ndarray = np.asarray(z, dtype=float).reshape(-1, 1)
        return self.target.inverse_transform(column).ravel()

    def to_dict(self) -> Dict:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "y_mean": self.y_mean,
            "y_std": self.y_std,
        }

    @classmethod
    def from_dict(cls, d: Dict) -> "Scaler":
        return cls(
            features=_restore(d["mean"], d["std"]),
            target=_restore([d["y_mean"]], [d["y_std"]]),
        )


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """
    Standardized design matrix X with aligned targets y and dates. `raw` keeps the unstandardized features and
    `temperature` the full temperature series of the source the matrix was built from
    """

    X: np.ndarray
    y: np.ndarray
    dates: pd.DatetimeIndex
    raw: pd.DataFrame
    scaler: Scaler
    source: TemperatureSource
    temperature: pd.Series

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def columns(self) -> List[str]:
        return list(self.raw.columns)

    def subset(self, rows: np.ndarray) -> "FeatureMatrix":
        """
        Selects rows, keeping the scaler
        :param rows: Integer row positions or a boolean mask
        :return: A new FeatureMatrix over the selected rows
        """
        return FeatureMatrix(
            X=self.X[rows],
            y=self.y[rows],
            dates=self.dates[rows],
            raw=self.raw.iloc[rows],
            scaler=self.scaler,
            source=self.source,
            temperature=self.temperature,
        )


def build_matrix(
    dataset: pd.DataFrame,
    date_range: Tuple[date, date],
    temperature_source: TemperatureSource = "forecast",
    scaler: Optional[Scaler] = None,
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> FeatureMatrix:
    """
    Builds every feasible row in an inclusive date range, in date order. Rows with a missing lag are skipped
    :param dataset: A date-indexed dataset frame
    :param date_range: Inclusive (first, last) dates
    :param temperature_source: Which temperature column feeds the temperature features
    :param scaler: A scaler fitted on training rows; fitted on these rows when omitted
    :param cal: The holiday calendar
    :return: The FeatureMatrix
    """
    first, last = date_range
    view: DatasetView = DatasetView(dataset, temperature_source)

    in_range: pd.DatetimeIndex = dataset.index[
        (dataset.index >= pd.Timestamp(first)) & (dataset.index <= pd.Timestamp(last))
    ]

    rows: List[np.ndarray] = list()
    kept: List[pd.Timestamp] = list()
    skipped: int = 0
    for ts in in_range:
        try:
            rows.append(_assemble(view, ts.date(), cal))
            kept.append(ts)
        except MissingLagError as e:
            skipped += 1
            log.debug(f"Skipping row: {e}")

    if not rows:
        raise EmptyMatrixError(f"No feasible feature row between {first} and {last}")

    if skipped:
        log.info(
            f"Skipped {skipped} row(s) with missing lags between {first} and {last}."
        )

    dates: pd.DatetimeIndex = pd.DatetimeIndex(kept, name="date")
    raw: np.ndarray = np.vstack(rows)
    y: np.ndarray = dataset.loc[dates, "rgd"].to_numpy(dtype=float)

    if scaler is None:
        log.info(f"Fitting feature scaler on {len(dates)} training rows...")
        scaler = Scaler.fit(raw, y)

    return FeatureMatrix(
        X=scaler.transform(raw),
        y=y,
        dates=dates,
        raw=pd.DataFrame(raw, index=dates, columns=FEATURE_COLUMNS),
        scaler=scaler,
        source=temperature_source,
        temperature=temperature_series(dataset, temperature_source),
    )


def dump_features(matrix: FeatureMatrix, filepath: str) -> None:
    """
    Writes the unstandardized feature matrix and targets to CSV with round-trip float precision
    :param matrix: The FeatureMatrix to dump
    :param filepath: Destination CSV path
    """
    out: pd.DataFrame = matrix.raw.copy()
    out.insert(0, "rgd", matrix.y)
    out.index = out.index.strftime("%Y-%m-%d")
    out.index.name = "date"

    ensure_parent_dir(filepath)
    log.info(f"Dumping {matrix.n} x {matrix.p} feature matrix to {filepath}...")
    out.to_csv(filepath, float_format="%.17g", lineterminator="\n")


def read_features(filepath: str) -> pd.DataFrame:
    """
    Reads a feature dump written by dump_features
    :param filepath: The CSV path
    :return: A date-indexed frame with the target column `rgd` followed by FEATURE_COLUMNS
    """
    df: pd.DataFrame = pd.read_csv(
        filepath, index_col="date", parse_dates=["date"], float_precision="round_trip"
    )
    if list(df.columns) != ["rgd"] + FEATURE_COLUMNS:
        raise DataFormatError(f"{filepath} is not a feature dump")
    return df
