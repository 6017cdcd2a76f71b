"""
Propagation of temperature forecast errors into gas demand forecast errors

With demand linear in HDD, RGD = g(x) + alpha HDD(T), a forecaster fed T + eps instead
of T adds a variance P(T<18) alpha^2 sigma2_eps to its error, so its RMSE becomes
sqrt(sigma2_0 + P(T<18) alpha^2 sigma2_eps).

Example Usage:
```
params = estimate_params(dataset, sigma2_0=13.31)
print(performance_limit(params), predicted_rmse(params.sigma2_0, params))
```
"""

# Standard Library Imports
from dataclasses import dataclass, replace
from typing import List, Mapping

# Non-Standard Imports
import numpy as np
import pandas as pd
from scipy import stats

# Local Imports
from gas_forecast.common.errors import (
    DataFormatError,
    InvalidConfigError,
    NoColdDaysError,
    ZeroDenominatorError,
)
from gas_forecast.common.log import log
from gas_forecast.datagen import GeneratorConfig, demand_noise, simulate_temperature
from gas_forecast.features import HDD_BASE, hdd

DAYS_PER_YEAR: float = 365.25


@dataclass(frozen=True)
class ErrorPropParams:
    """
    alpha: HDD sensitivity in MSCM per degree; p_cold: P(T < 18); sigma2_eps:
    temperature forecast error variance; sigma2_0: variance of the temperature-free
    forecast error, supplied from a true-temperature backtest
    """

    alpha: float
    p_cold: float
    sigma2_eps: float
    sigma2_0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_cold <= 1.0:
            raise InvalidConfigError(f"p_cold must lie in [0, 1], got {self.p_cold}")
        if self.sigma2_eps < 0 or self.sigma2_0 < 0:
            raise InvalidConfigError(
                f"Variances must be non-negative, "
                f"got {self.sigma2_eps} and {self.sigma2_0}"
            )


def temperature_variance(params: ErrorPropParams) -> float:
    """The variance P(T<18) alpha^2 sigma2_eps added by temperature forecast errors"""
    return params.p_cold * params.alpha**2 * params.sigma2_eps


def performance_limit(params: ErrorPropParams) -> float:
    """
    Lowest RMSE reachable with forecast temperatures, even by a forecaster exact on true
    temperatures
    :param params: The ErrorPropParams
    :return: sqrt(P(T<18) alpha^2 sigma2_eps) in MSCM
    """
    return float(np.sqrt(temperature_variance(params)))


def predicted_rmse(sigma2_0: float, params: ErrorPropParams) -> float:
    """
    RMSE of a forecaster with true-temperature error variance sigma2_0 once fed forecast
    temperatures
    :param sigma2_0: MSE with true temperatures, MSCM^2
    :param params: The ErrorPropParams
    :return: sqrt(sigma2_0 + P(T<18) alpha^2 sigma2_eps)
    """
    if sigma2_0 < 0:
        raise InvalidConfigError(f"sigma2_0 must be non-negative, got {sigma2_0}")
    return float(np.sqrt(sigma2_0 + temperature_variance(params)))


def negligibility_threshold(sigma2_0: float, params: ErrorPropParams) -> float:
    """
    Temperature error variance at which the temperature term equals sigma2_0. Well below
    it, temperature errors are negligible
    :param sigma2_0: MSE with true temperatures, MSCM^2
    :param params: The ErrorPropParams
    :return: sigma2_0 / (P(T<18) alpha^2) in degrees^2
    """
    denominator: float = params.p_cold * params.alpha**2
    if denominator == 0:
        raise ZeroDenominatorError(
            "P(T<18) alpha^2 is zero, temperature errors never propagate"
        )
    return float(sigma2_0 / denominator)


def temperature_mse_share(sigma2_0: float, mse_measured: float) -> float:
    """
    Share of a measured forecast-temperature MSE attributable to temperature errors,
    (MSE - sigma2_0) / MSE
    :param sigma2_0: MSE with true temperatures
    :param mse_measured: MSE with forecast temperatures
    :return: The share, a fraction
    """
    if mse_measured == 0:
        raise ZeroDenominatorError("Measured MSE is zero")
    return float((mse_measured - sigma2_0) / mse_measured)


def quadrature_table(
    rmse_table: pd.DataFrame, limits: Mapping[str, float]
) -> pd.DataFrame:
    """
    Adds each period's performance limit in quadrature to a table of true-temperature
    RMSEs
    :param rmse_table: RMSEs with models as rows and periods as columns
    :param limits: Performance limit of each period column
    :return: Predicted forecast-temperature RMSEs, same shape
    """
    missing: List[str] = [str(c) for c in rmse_table.columns if c not in limits]
    if missing:
        raise DataFormatError(
            f"No performance limit for period(s): {', '.join(missing)}"
        )
    squared_limits: pd.Series = pd.Series(
        {c: limits[c] ** 2 for c in rmse_table.columns}
    )
    return np.sqrt(rmse_table.astype(float) ** 2 + squared_limits)


def estimate_params(dataset: pd.DataFrame, sigma2_0: float = 0.0) -> ErrorPropParams:
    """
    Estimates the propagation parameters from a dataset with both temperature columns
    :param dataset: A date-indexed dataset frame with rgd, temp_actual and temp_forecast
    :param sigma2_0: The true-temperature forecast MSE to carry along
    :return: The ErrorPropParams
    """
    if "temp_actual" not in dataset.columns:
        raise DataFormatError(
            "Error propagation needs both actual and forecast temperatures"
        )
    if len(dataset) < 2:
        raise DataFormatError("Error propagation needs at least two days")

    actual: np.ndarray = dataset["temp_actual"].to_numpy(dtype=float)
    forecast: np.ndarray = dataset["temp_forecast"].to_numpy(dtype=float)
    rgd: np.ndarray = dataset["rgd"].to_numpy(dtype=float)

    # Cold days are classified on the actual temperature
    cold: np.ndarray = actual < HDD_BASE
    if not cold.any():
        raise NoColdDaysError(
            f"No day below {HDD_BASE} degrees, alpha cannot be estimated"
        )

    alpha: float = float(stats.linregress(hdd(actual), rgd).slope)
    if alpha <= 0:
        log.warning(f"Estimated HDD sensitivity alpha={alpha:.4g} is not positive")

    params: ErrorPropParams = ErrorPropParams(
        alpha=alpha,
        p_cold=float(cold.mean()),
        sigma2_eps=float(np.var(forecast - actual, ddof=1)),
        sigma2_0=float(sigma2_0),
    )
    log.info(f"Estimated {params} over {len(dataset)} days")
    return params


def yearly_params(dataset: pd.DataFrame, sigma2_0: float = 0.0) -> pd.DataFrame:
    """
    Estimates the parameters per calendar year and over the pooled period, with the
    resulting performance limit
    :param dataset: A date-indexed dataset frame with both temperature columns
    :param sigma2_0: The true-temperature forecast MSE to carry along
    :return: A frame with columns period, alpha, p_cold, sigma2_eps, performance_limit
    """
    rows: List[dict] = list()
    groups = [
        (str(year), group) for year, group in dataset.groupby(dataset.index.year)
    ] + [("all", dataset)]
    for period, group in groups:
        params: ErrorPropParams = estimate_params(group, sigma2_0)
        rows.append(
            {
                "period": period,
                "alpha": params.alpha,
                "p_cold": params.p_cold,
                "sigma2_eps": params.sigma2_eps,
                "performance_limit": performance_limit(params),
            }
        )
    return pd.DataFrame(rows)


def rmse_curve(
    sigma2_0: float, params: ErrorPropParams, sigma2_eps_values
) -> pd.DataFrame:
    """
    Predicted gas RMSE against the temperature forecast error
    :param sigma2_0: MSE with true temperatures
    :param params: The ErrorPropParams; its sigma2_eps is replaced along the curve
    :param sigma2_eps_values: Temperature error variances to evaluate
    :return: A frame with columns sigma2_eps, temperature_rmse and predicted_rmse
    """
    values: np.ndarray = np.asarray(sigma2_eps_values, dtype=float)
    if values.size == 0:
        raise DataFormatError("The curve needs at least one sigma2_eps value")
    predicted: List[float] = [
        predicted_rmse(sigma2_0, replace(params, sigma2_eps=float(v))) for v in values
    ]
    return pd.DataFrame(
        {
            "sigma2_eps": values,
            "temperature_rmse": np.sqrt(values),
            "predicted_rmse": predicted,
        }
    )


@dataclass(frozen=True)
class MonteCarloResult:
    empirical_rmse: float
    predicted_rmse: float
    relative_gap: float
    params: ErrorPropParams


def monte_carlo_validate(
    config: GeneratorConfig, n_days: int = 100_000, seed: int = 0
) -> MonteCarloResult:
    """
    Simulates an idealized forecaster that knows the temperature-free demand up to the
    generator noise, whose variance averages sigma0^2 over a year, and the HDD
    sensitivity exactly, feeds it forecast temperatures and compares its empirical RMSE
    to the prediction
    :param config: The generator config holding the ground truth
    :param n_days: Number of simulated days
    :param seed: The random seed
    :return: The MonteCarloResult
    """
    rng: np.random.Generator = np.random.default_rng(seed)
    day: np.ndarray = np.arange(n_days)
    yeardays: np.ndarray = day % DAYS_PER_YEAR + 1.0
    actual, forecast = simulate_temperature(config, yeardays, rng)

    base: np.ndarray = np.asarray(config.weekly_profile)[day % 7]
    noise: np.ndarray = demand_noise(config, yeardays, rng)
    truth: np.ndarray = base + config.alpha * hdd(actual) + noise
    forecasted: np.ndarray = base + config.alpha * hdd(forecast)
    empirical: float = float(np.sqrt(np.mean((truth - forecasted) ** 2)))

    params: ErrorPropParams = ErrorPropParams(
        alpha=config.alpha,
        p_cold=float(np.mean(actual < HDD_BASE)),
        sigma2_eps=config.sigma2_eps,
        sigma2_0=config.sigma2_0,
    )
    predicted: float = predicted_rmse(config.sigma2_0, params)
    gap: float = (
        abs(empirical - predicted) / predicted if predicted > 0 else abs(empirical)
    )
    log.info(
        f"Monte Carlo over {n_days} days: empirical RMSE {empirical:.4f}, "
        f"predicted {predicted:.4f}"
    )
    return MonteCarloResult(
        empirical_rmse=empirical,
        predicted_rmse=predicted,
        relative_gap=gap,
        params=params,
    )
