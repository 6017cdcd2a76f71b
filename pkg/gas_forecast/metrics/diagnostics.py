"""
Exploratory diagnostics of a demand series: autocorrelation, periodogram, correlations
between lags and the tables behind the exploratory figures
"""

# Standard Library Imports
from datetime import date, timedelta
from typing import Dict, List, Optional

# Non-Standard Imports
import numpy as np
import pandas as pd
from scipy import signal, stats
from statsmodels.tsa import stattools

# Local Imports
from gas_forecast.calendar import HolidayCalendar, ITALIAN_CALENDAR, similar_day
from gas_forecast.common.errors import (
    ConstantSeriesError,
    DataFormatError,
    LengthMismatchError,
)
from gas_forecast.features import hdd

SATURDAY: int = 5
MONDAY: int = 0


def _finite(series, name: str = "series") -> np.ndarray:
    x: np.ndarray = np.asarray(series, dtype=float).ravel()
    if not np.isfinite(x).all():
        raise DataFormatError(f"The {name} has non-finite values")
    return x


def autocorrelation(series, max_lag: int) -> pd.Series:
    """
    Biased sample autocorrelation, sum_t (x_t - m)(x_t+k - m) / sum_t (x_t - m)^2
    :param series: The series
    :param max_lag: Largest lag, < len(series)
    :return: A lag-indexed series starting with acf(0) = 1
    """
    x: np.ndarray = _finite(series)
    n: int = x.shape[0]
    if not 0 <= max_lag < n:
        raise LengthMismatchError(
            f"max_lag={max_lag} needs a series longer than {max_lag}, got {n}"
        )
    if np.ptp(x) == 0:
        raise ConstantSeriesError("Autocorrelation of a constant series is undefined")

    values: np.ndarray = stattools.acf(x, adjusted=False, nlags=max_lag, fft=True)
    return pd.Series(values, index=pd.RangeIndex(max_lag + 1, name="lag"), name="acf")


def periodogram(series) -> pd.DataFrame:
    """
    One-sided periodogram of the mean-removed series, scaled so the powers sum to the
    series variance
    :param series: The series
    :return: A frame with columns frequency_index k, period n/k in samples and power,
        for k = 1..n//2
    """
    x: np.ndarray = _finite(series)
    n: int = x.shape[0]
    if n < 2:
        raise LengthMismatchError("Periodogram needs at least two samples")

    frequencies, power = signal.periodogram(
        x, fs=1.0, window="boxcar", detrend="constant", scaling="spectrum"
    )
    # Drop the zero-frequency bin
    k: np.ndarray = np.rint(frequencies[1:] * n).astype(int)
    return pd.DataFrame({"frequency_index": k, "period": n / k, "power": power[1:]})


def pearson(x, y) -> float:
    """
    Pearson correlation coefficient
    :param x: First series
    :param y: Second series, same length
    :return: The coefficient in [-1, 1]
    """
    a: np.ndarray = _finite(x, "first series")
    b: np.ndarray = _finite(y, "second series")
    if a.shape != b.shape:
        raise LengthMismatchError(f"Series of length {a.shape[0]} and {b.shape[0]}")
    if a.shape[0] < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ConstantSeriesError("Correlation with a constant series is undefined")
    return float(np.clip(stats.pearsonr(a, b)[0], -1.0, 1.0))


def lag_correlation(series: pd.Series, lag: int = 1) -> float:
    """Correlation between x(t) and x(t - lag) over the days where both are present"""
    shifted: pd.Series = series.shift(lag, freq="D").reindex(series.index)
    present: np.ndarray = shifted.notna().to_numpy()
    return pearson(series.to_numpy()[present], shifted.to_numpy()[present])


def lag1_correlation_excluding_weekend_transitions(series: pd.Series) -> float:
    """
    Lag-1 correlation without the (Saturday, Friday) and (Monday, Sunday) pairs, where
    working and non-working days meet
    :param series: Date-indexed daily series
    :return: The correlation
    """
    shifted: pd.Series = series.shift(1, freq="D").reindex(series.index)
    weekday: np.ndarray = pd.DatetimeIndex(series.index).weekday.to_numpy()
    keep: np.ndarray = (
        shifted.notna().to_numpy() & (weekday != SATURDAY) & (weekday != MONDAY)
    )
    return pearson(series.to_numpy()[keep], shifted.to_numpy()[keep])


def similar_day_difference_correlation(
    series: pd.Series, cal: HolidayCalendar = ITALIAN_CALENDAR
) -> float:
    """
    Correlation between x(t) - x(sim(t)) and x(t-1) - x(sim(t-1)), the persistence that
    motivates the similar-day lags
    :param series: Date-indexed daily series
    :param cal: The holiday calendar
    :return: The correlation
    """
    lookup: Dict[date, float] = {ts.date(): float(v) for ts, v in series.items()}
    one: timedelta = timedelta(days=1)

    today: List[float] = list()
    yesterday: List[float] = list()
    for t in lookup:
        needed: List[date] = [t - one, similar_day(t, cal), similar_day(t - one, cal)]
        if all(d in lookup for d in needed):
            today.append(lookup[t] - lookup[needed[1]])
            yesterday.append(lookup[needed[0]] - lookup[needed[2]])
    return pearson(today, yesterday)


def _temperature_column(dataset: pd.DataFrame, preferred: str) -> str:
    return preferred if preferred in dataset.columns else "temp_forecast"


def correlation_summary(
    dataset: pd.DataFrame, temperature_column: str = "temp_actual"
) -> pd.DataFrame:
    """
    The correlation figures of a demand dataset in one table
    :param dataset: A date-indexed dataset frame
    :param temperature_column: Temperature column paired with demand
    :return: A frame with columns statistic and value
    """
    rgd: pd.Series = dataset["rgd"]
    temperature: np.ndarray = dataset[
        _temperature_column(dataset, temperature_column)
    ].to_numpy(dtype=float)
    values: Dict[str, float] = {
        "lag1": lag_correlation(rgd, 1),
        "lag1_no_weekend_transitions": lag1_correlation_excluding_weekend_transitions(
            rgd
        ),
        "lag7": lag_correlation(rgd, 7),
        "similar_day_difference": similar_day_difference_correlation(rgd),
        "rgd_vs_temperature": pearson(rgd, temperature),
        "rgd_vs_hdd": pearson(rgd, hdd(temperature)),
    }
    return pd.DataFrame(
        [{"statistic": name, "value": value} for name, value in values.items()]
    )


def demand_temperature_table(
    dataset: pd.DataFrame, temperature_column: str = "temp_actual"
) -> pd.DataFrame:
    """
    Daily demand paired with temperature and HDD, the data of the demand/temperature
    scatter plots
    :param dataset: A date-indexed dataset frame
    :param temperature_column: Temperature column paired with demand
    :return: A frame with columns date, temperature, hdd and rgd
    """
    temperature: np.ndarray = dataset[
        _temperature_column(dataset, temperature_column)
    ].to_numpy(dtype=float)
    return pd.DataFrame(
        {
            "date": dataset.index.strftime("%Y-%m-%d"),
            "temperature": temperature,
            "hdd": hdd(temperature),
            "rgd": dataset["rgd"].to_numpy(dtype=float),
        }
    )


def weekday_shift(year: int, reference_year: int) -> int:
    """
    Days to add to the day of year of `year` so its weekdays line up with those of
    `reference_year`, in [-3, 3]
    :param year: The shifted year
    :param reference_year: The year whose weekdays are kept
    :return: The shift in days
    """
    offset: int = date(year, 1, 1).weekday() - date(reference_year, 1, 1).weekday()
    return (offset + 3) % 7 - 3


def yearly_overlay(
    series: pd.Series, reference_year: Optional[int] = None
) -> pd.DataFrame:
    """
    Lays every year of a daily series over a common axis, each year shifted so that
    equal positions fall on equal weekdays
    :param series: Date-indexed daily series
    :param reference_year: The year left unshifted, by default the last year present
    :return: A frame with columns year, aligned_day, date and the series values
    """
    if series.empty:
        raise LengthMismatchError("Cannot overlay an empty series")
    index: pd.DatetimeIndex = pd.DatetimeIndex(series.index)
    reference: int = int(index.year.max()) if reference_year is None else reference_year

    years: np.ndarray = index.year.to_numpy()
    shifts: np.ndarray = np.array([weekday_shift(int(y), reference) for y in years])
    name: str = series.name if isinstance(series.name, str) else "value"
    return pd.DataFrame(
        {
            "year": years,
            "aligned_day": index.dayofyear.to_numpy() + shifts,
            "date": index.strftime("%Y-%m-%d"),
            name: series.to_numpy(dtype=float),
        }
    )


def year_series(
    dataset: pd.DataFrame, year: int, temperature_column: str = "temp_actual"
) -> pd.DataFrame:
    """
    Demand and HDD of one calendar year
    :param dataset: A date-indexed dataset frame
    :param year: The calendar year
    :param temperature_column: Temperature column the HDD are computed from
    :return: A frame with columns date, rgd and hdd
    """
    table: pd.DataFrame = demand_temperature_table(dataset, temperature_column)
    in_year: pd.DataFrame = table[table["date"].str.startswith(f"{year}-")]
    if in_year.empty:
        raise LengthMismatchError(f"The dataset has no day in {year}")
    return in_year[["date", "rgd", "hdd"]].reset_index(drop=True)
