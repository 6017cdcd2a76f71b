from datetime import date

import numpy as np
import pandas as pd
import pytest

from gas_forecast.calendar import is_bridge_holiday, is_day_after_holiday, is_holiday
from gas_forecast.datagen import GeneratorConfig, generate_frame
from gas_forecast.features import FeatureMatrix, build_matrix, hdd
from gas_forecast.models import torus_basis
from gas_forecast.models.torus import DAYS_PER_YEAR, day_number


def make_torus_data(
    n_d: int, n_w: int, start="2012-01-01", end="2015-12-31", noise=0.0, seed=0
):
    """
    Demand drawn from the log-linear torus family. The first day has no HDD history and
    is dropped
    :return: (rgd, temperature, true coefficients)
    """
    dates = pd.date_range(start, end, freq="D")
    rng = np.random.default_rng(seed)
    seasonal = 14.0 - 9.0 * np.cos(2 * np.pi * dates.dayofyear / 365.25)
    temperature = pd.Series(seasonal + rng.normal(0, 2, len(dates)), index=dates)
    days = [ts.date() for ts in dates]
    t = day_number(dates)
    h = hdd(temperature.to_numpy())
    h_prev = hdd(temperature.shift(1).to_numpy())
    basis = torus_basis(t, n_d, n_w)

    theta_basis = rng.normal(0.0, 0.1, basis.shape[1])
    theta_basis[0] = 3.0
    log_rgd = (
        basis @ theta_basis
        + 0.01 * t / DAYS_PER_YEAR
        - 0.2 * np.array([is_holiday(d) for d in days])
        + 0.05 * np.array([is_day_after_holiday(d) for d in days])
        - 0.1 * np.array([is_bridge_holiday(d) for d in days])
        + 0.04 * h
        + 0.01 * (h - h_prev)
        + noise * rng.normal(size=len(dates))
    )
    theta = np.concatenate([theta_basis, [0.01, -0.2, 0.05, -0.1, 0.04, 0.01]])
    return pd.Series(np.exp(log_rgd), index=dates).iloc[1:], temperature, theta


@pytest.fixture(scope="session")
def torus_data():
    return make_torus_data


@pytest.fixture(scope="session")
def dataset() -> pd.DataFrame:
    return generate_frame(GeneratorConfig(start="2012-01-01", end="2015-12-31", seed=7))


@pytest.fixture(scope="session")
def train(dataset) -> FeatureMatrix:
    return build_matrix(dataset, (date(2013, 1, 1), date(2014, 12, 31)), "forecast")


@pytest.fixture(scope="session")
def test_matrix(dataset, train) -> FeatureMatrix:
    return build_matrix(
        dataset, (date(2015, 1, 1), date(2015, 3, 31)), "forecast", scaler=train.scaler
    )
