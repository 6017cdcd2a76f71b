"""
Multiperiodic log-linear model of demand on the torus of yearly and weekly phases, corrected each day by the ratio of
yesterday's observed demand to yesterday's long-term forecast

Example Usage:
```
state = torus_fit(dataset["rgd"], dataset["temp_forecast"], n_d=1, n_w=3)
rgd_hat = torus_predict(state, dates, rgd_prev, dataset["temp_forecast"])
```
"""

# Standard Library Imports
from dataclasses import dataclass
from datetime import date
from typing import Any, Dict, List, Optional

# Non-Standard Imports
import numpy as np
import pandas as pd

# Local Imports
from gas_forecast.calendar import (
    HolidayCalendar,
    ITALIAN_CALENDAR,
    is_bridge_holiday,
    is_day_after_holiday,
    is_holiday,
)
from gas_forecast.common.errors import (
    EmptyMatrixError,
    InvalidHyperparameterError,
    MissingLagError,
    NonPositiveDemandError,
)
from gas_forecast.common.log import log
from gas_forecast.common.types import Hyperparameters
from gas_forecast.features import FeatureMatrix, Scaler, hdd
from gas_forecast.models.base import ForecastModel

# Yearly and weekly angular frequencies, per day
PSI: float = 2.0 * np.pi / 365.25
OMEGA: float = 2.0 * np.pi / 7.0

EPOCH: pd.Timestamp = pd.Timestamp(date(2000, 1, 1))
DAYS_PER_YEAR: float = 365.25

FLAG_REGRESSORS: List[str] = ["holiday", "day_after_holiday", "bridge_holiday"]
HDD_REGRESSORS: List[str] = ["hdd", "hdd_diff"]

# RSS/n floor so exact fits compare on parameter count
AIC_VARIANCE_FLOOR: float = 1e-20


@dataclass(frozen=True, eq=False)
class TorusState:
    n_d: int
    n_w: int
    theta: np.ndarray
    rss: float
    n: int

    @property
    def k(self) -> int:
        return self.theta.shape[0]


def day_number(dates: pd.DatetimeIndex) -> np.ndarray:
    """Days elapsed since 2000-01-01"""
    elapsed: pd.TimedeltaIndex = pd.DatetimeIndex(dates) - EPOCH
    return (elapsed / pd.Timedelta(days=1)).to_numpy(dtype=float)


def _check_counts(n_d: int, n_w: int) -> None:
    if n_d < 0 or n_w < 0:
        raise InvalidHyperparameterError(
            f"Harmonic counts must be non-negative, got N_d={n_d}, N_w={n_w}"
        )


def _harmonics(t: np.ndarray, n: int, frequency: float) -> np.ndarray:
    columns: List[np.ndarray] = [np.ones_like(t)]
    for k in range(1, n + 1):
        columns += [np.cos(k * frequency * t), np.sin(k * frequency * t)]
    return np.column_stack(columns)


def torus_basis(t: np.ndarray, n_d: int, n_w: int) -> np.ndarray:
    """
    Tensor product of the yearly harmonics {1, cos(k Psi t), sin(k Psi t)} k<=N_d and the weekly harmonics
    {1, cos(k Omega t), sin(k Omega t)} k<=N_w
    :param t: Day numbers
    :param n_d: Yearly harmonic count >= 0
    :param n_w: Weekly harmonic count >= 0
    :return: A len(t) x (1+2N_d)(1+2N_w) array, first column constant
    """
    _check_counts(n_d, n_w)
    t = np.asarray(t, dtype=float)
    yearly: np.ndarray = _harmonics(t, n_d, PSI)
    weekly: np.ndarray = _harmonics(t, n_w, OMEGA)
    return (yearly[:, :, None] * weekly[:, None, :]).reshape(t.shape[0], -1)


def torus_regressors(
    dates: pd.DatetimeIndex,
    temperature: pd.Series,
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> pd.DataFrame:
    """
    The non-harmonic regressors of each date: holiday flags, HDD(t) and HDD(t) - HDD(t-1). HDD values are NaN where
    the temperature series has no record
    :param dates: The dates
    :param temperature: Date-indexed temperature series
    :param cal: The holiday calendar
    :return: A date-indexed frame with FLAG_REGRESSORS + HDD_REGRESSORS columns
    """
    dates = pd.DatetimeIndex(dates)
    days: List[date] = [ts.date() for ts in dates]
    today: np.ndarray = temperature.reindex(dates).to_numpy(dtype=float)
    yesterday: np.ndarray = temperature.reindex(
        dates - pd.Timedelta(days=1)
    ).to_numpy(dtype=float)

    # NaN propagates through np.maximum
    hdd_t: np.ndarray = hdd(today)
    hdd_t1: np.ndarray = hdd(yesterday)

    return pd.DataFrame(
        {
            "holiday": [float(is_holiday(d, cal)) for d in days],
            "day_after_holiday": [float(is_day_after_holiday(d, cal)) for d in days],
            "bridge_holiday": [float(is_bridge_holiday(d, cal)) for d in days],
            "hdd": hdd_t,
            "hdd_diff": hdd_t - hdd_t1,
        },
        index=dates,
    )


def torus_design(
    dates: pd.DatetimeIndex, regressors: pd.DataFrame, n_d: int, n_w: int
) -> np.ndarray:
    """
    Full design matrix: tensor basis, trend slope in years, holiday flags, HDD and its first difference
    :param dates: The dates
    :param regressors: Output of torus_regressors for the same dates
    :param n_d: Yearly harmonic count
    :param n_w: Weekly harmonic count
    :return: len(dates) x k design matrix
    """
    t: np.ndarray = day_number(dates)
    return np.column_stack(
        [
            torus_basis(t, n_d, n_w),
            t / DAYS_PER_YEAR,
            regressors[FLAG_REGRESSORS + HDD_REGRESSORS].to_numpy(dtype=float),
        ]
    )


def torus_aic(rss: float, n: int, k: int) -> float:
    """AIC under Gaussian residuals, n ln(RSS/n) + 2k"""
    return float(n * np.log(max(rss / n, AIC_VARIANCE_FLOOR)) + 2 * k)


def torus_fit(
    rgd: pd.Series,
    temperature: pd.Series,
    n_d: int,
    n_w: int,
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> TorusState:
    """
    Least-squares fit of ln RGD on the torus design. Days without a temperature record for t or t-1 are left out
    :param rgd: Date-indexed demand series, all values > 0
    :param temperature: Date-indexed temperature series
    :param n_d: Yearly harmonic count
    :param n_w: Weekly harmonic count
    :param cal: The holiday calendar
    :return: The fitted TorusState
    """
    if (rgd <= 0).any():
        bad: pd.Timestamp = rgd.index[(rgd <= 0).to_numpy()][0]
        raise NonPositiveDemandError(
            f"Log model needs positive demand, got {rgd[bad]} on {bad.date()}"
        )

    regressors: pd.DataFrame = torus_regressors(rgd.index, temperature, cal)
    usable: np.ndarray = regressors[HDD_REGRESSORS].notna().all(axis=1).to_numpy()
    if not usable.any():
        raise EmptyMatrixError("No day with temperature records for both t and t-1")
    if not usable.all():
        log.debug(
            f"Torus fit leaves out {int((~usable).sum())} day(s) "
            f"without temperature history"
        )

    dates: pd.DatetimeIndex = rgd.index[usable]
    design: np.ndarray = torus_design(dates, regressors[usable], n_d, n_w)
    log_rgd: np.ndarray = np.log(rgd.to_numpy(dtype=float)[usable])

    # Minimum-norm solution, so flag groups absent from the training window do not fail
    theta, _, _, _ = np.linalg.lstsq(design, log_rgd, rcond=None)
    rss: float = float(np.sum((log_rgd - design @ theta) ** 2))
    return TorusState(
        n_d=int(n_d), n_w=int(n_w), theta=theta, rss=rss, n=int(usable.sum())
    )


def torus_long_term(
    state: TorusState,
    dates: pd.DatetimeIndex,
    temperature: pd.Series,
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> np.ndarray:
    """
    Long-term forecast exp(F(t))
    :param state: The fitted TorusState
    :param dates: The forecast dates
    :param temperature: Date-indexed temperature series covering t and t-1
    :param cal: The holiday calendar
    :return: Strictly positive forecasts in MSCM
    """
    dates = pd.DatetimeIndex(dates)
    regressors: pd.DataFrame = torus_regressors(dates, temperature, cal)
    missing: np.ndarray = regressors[HDD_REGRESSORS].isna().any(axis=1).to_numpy()
    if missing.any():
        first: pd.Timestamp = dates[missing][0]
        no_today: bool = bool(np.isnan(temperature.get(first, np.nan)))
        absent: pd.Timestamp = first if no_today else first - pd.Timedelta(days=1)
        raise MissingLagError(absent.date(), first.date())
    return np.exp(torus_design(dates, regressors, state.n_d, state.n_w) @ state.theta)


def torus_predict(
    state: TorusState,
    dates: pd.DatetimeIndex,
    rgd_prev: np.ndarray,
    temperature: pd.Series,
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> np.ndarray:
    """
    Short-term forecast long(t) * RGD(t-1) / long(t-1)
    :param state: The fitted TorusState
    :param dates: The forecast dates t
    :param rgd_prev: Observed demand of each t-1, > 0
    :param temperature: Date-indexed temperature series covering t-2 to t
    :param cal: The holiday calendar
    :return: Forecasts in MSCM
    """
    dates = pd.DatetimeIndex(dates)
    today: np.ndarray = torus_long_term(state, dates, temperature, cal)
    yesterday: np.ndarray = torus_long_term(
        state, dates - pd.Timedelta(days=1), temperature, cal
    )
    return today * np.asarray(rgd_prev, dtype=float) / yesterday


class TorusModel(ForecastModel):
    """
    Wraps the log-linear torus model behind the feature-matrix contract. Only dates, the temperature series and the
    rgd_lag1 column of the matrix are used
    """

    kind: str = "torus"

    def __init__(
        self, n_d: int = 1, n_w: int = 3, cal: HolidayCalendar = ITALIAN_CALENDAR
    ):
        super().__init__()
        _check_counts(n_d, n_w)
        self.n_d: int = int(n_d)
        self.n_w: int = int(n_w)
        self.cal: HolidayCalendar = cal
        self.state: Optional[TorusState] = None

    def hyperparameters(self) -> Hyperparameters:
        return {"n_d": self.n_d, "n_w": self.n_w}

    def fit(self, matrix: FeatureMatrix) -> "TorusModel":
        log.info(
            f"Fitting torus model with N_d={self.n_d}, N_w={self.n_w} "
            f"on {matrix.n} rows..."
        )
        rgd: pd.Series = pd.Series(matrix.y, index=matrix.dates)
        self.state = torus_fit(rgd, matrix.temperature, self.n_d, self.n_w, self.cal)
        self.scaler = matrix.scaler
        return self

    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        self.check_fitted()
        rgd_prev: np.ndarray = matrix.raw["rgd_lag1"].to_numpy(dtype=float)
        return torus_predict(
            self.state, matrix.dates, rgd_prev, matrix.temperature, self.cal
        )

    def state_dict(self) -> Dict[str, Any]:
        self.check_fitted()
        return {
            "theta": self.state.theta.tolist(),
            "rss": self.state.rss,
            "n": self.state.n,
            "scaler": self.scaler.to_dict(),
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.state = TorusState(
            n_d=self.n_d,
            n_w=self.n_w,
            theta=np.asarray(state["theta"], dtype=float),
            rss=float(state["rss"]),
            n=int(state["n"]),
        )
        self.scaler = Scaler.from_dict(state["scaler"])
