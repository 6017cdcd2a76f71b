"""
Forecast error metrics and the per-model evaluation report

Example Usage:
```
evaluation = ModelEvaluation("ridge", "forecast", 2017, actual, predicted)
print(evaluation.mae, evaluation.mape, evaluation.rmse)
```
"""

# Standard Library Imports
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

# Non-Standard Imports
import numpy as np
import pandas as pd

# Local Imports
from gas_forecast.common.errors import (
    LengthMismatchError,
    ZeroRMSEError,
    ZeroTargetError,
)

# October to March
COLD_MONTHS: Tuple[int, ...] = (10, 11, 12, 1, 2, 3)


def _pair(actual, predicted) -> Tuple[np.ndarray, np.ndarray]:
    a: np.ndarray = np.asarray(actual, dtype=float).ravel()
    p: np.ndarray = np.asarray(predicted, dtype=float).ravel()
    if a.shape != p.shape:
        raise LengthMismatchError(
            f"{a.shape[0]} actual values against {p.shape[0]} predictions"
        )
    if a.shape[0] == 0:
        raise LengthMismatchError("Metrics need at least one value")
    return a, p


def mae(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def mape(actual, predicted) -> float:
    """
    Mean absolute percentage error, in percent
    :param actual: Observed demand, all > 0
    :param predicted: Forecasts
    :return: MAPE in %
    """
    a, p = _pair(actual, predicted)
    if (a <= 0).any():
        raise ZeroTargetError(
            f"MAPE undefined with {int((a <= 0).sum())} non-positive target(s)"
        )
    return float(100.0 * np.mean(np.abs(a - p) / a))


def rmse(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def gaussian_reference() -> float:
    """MAE/RMSE of zero-mean Gaussian residuals, sqrt(2/pi)"""
    return float(np.sqrt(2.0 / np.pi))


def mae_rmse_ratio(residuals) -> float:
    """
    MAE/RMSE of a residual vector. Values below sqrt(2/pi) point to heavier-than-Gaussian tails
    :param residuals: The residuals
    :return: A ratio in (0, 1]
    """
    r: np.ndarray = np.asarray(residuals, dtype=float).ravel()
    if r.shape[0] == 0:
        raise LengthMismatchError("Ratio needs at least one residual")
    root_mean_square: float = float(np.sqrt(np.mean(r**2)))
    if root_mean_square == 0.0:
        raise ZeroRMSEError("All residuals are zero")
    return float(np.mean(np.abs(r)) / root_mean_square)


def monthly_breakdown(actual: pd.Series, predicted) -> pd.DataFrame:
    """
    MAE and MAPE per calendar month, pooling the days of that month across all years of the series
    :param actual: Date-indexed observed demand
    :param predicted: Forecasts aligned with actual
    :return: A frame indexed by month number (present months only) with columns mae, mape and days
    """
    _pair(actual, predicted)
    frame: pd.DataFrame = pd.DataFrame(
        {
            "actual": actual.to_numpy(dtype=float),
            "predicted": np.asarray(predicted, dtype=float),
        },
        index=pd.DatetimeIndex(actual.index),
    )
    rows: List[dict] = list()
    for month, group in frame.groupby(frame.index.month):
        rows.append(
            {
                "month": int(month),
                "mae": mae(group["actual"], group["predicted"]),
                "mape": mape(group["actual"], group["predicted"]),
                "days": len(group),
            }
        )
    return pd.DataFrame(rows, columns=["month", "mae", "mape", "days"]).set_index(
        "month"
    )


def cold_months_mape(actual: pd.Series, predicted) -> float:
    """
    MAPE restricted to October through March
    :param actual: Date-indexed observed demand
    :param predicted: Forecasts aligned with actual
    :return: MAPE in % over the cold-season days
    """
    _pair(actual, predicted)
    cold: np.ndarray = np.isin(pd.DatetimeIndex(actual.index).month, COLD_MONTHS)
    return mape(
        actual.to_numpy(dtype=float)[cold], np.asarray(predicted, dtype=float)[cold]
    )


@dataclass(frozen=True, eq=False)
class ModelEvaluation:
    """Forecasts of one model over one test year in one temperature session"""

    model: str
    session: str
    year: int
    actual: pd.Series
    predicted: np.ndarray

    @property
    def residuals(self) -> pd.Series:
        return pd.Series(
            self.actual.to_numpy(dtype=float) - self.predicted,
            index=self.actual.index,
            name=self.model,
        )

    @property
    def mae(self) -> float:
        return mae(self.actual, self.predicted)

    @property
    def mape(self) -> float:
        return mape(self.actual, self.predicted)

    @property
    def rmse(self) -> float:
        return rmse(self.actual, self.predicted)


@dataclass(eq=False)
class EvaluationReport:
    """
    The evaluations of one temperature session, one per (model, test year), with the tables built from them
    """

    session: str
    evaluations: List[ModelEvaluation] = field(default_factory=list)

    @property
    def models(self) -> List[str]:
        return list(dict.fromkeys(e.model for e in self.evaluations))

    def _for_model(self, model: str) -> List[ModelEvaluation]:
        return [e for e in self.evaluations if e.model == model]

    def pooled(self, model: str) -> Tuple[pd.Series, np.ndarray]:
        """Actual demand and forecasts of a model concatenated over all test years"""
        evaluations: List[ModelEvaluation] = self._for_model(model)
        if not evaluations:
            raise LengthMismatchError(
                f"No evaluation for model '{model}' in session '{self.session}'"
            )
        actual: pd.Series = pd.concat([e.actual for e in evaluations])
        return actual, np.concatenate([e.predicted for e in evaluations])

    def residuals(self, model: str) -> pd.Series:
        actual, predicted = self.pooled(model)
        return pd.Series(
            actual.to_numpy(dtype=float) - predicted, index=actual.index, name=model
        )

    def yearly_table(self) -> pd.DataFrame:
        """One row per (model, year) plus an `all` row per model over the pooled test days"""
        rows: List[dict] = list()
        for model in self.models:
            for e in self._for_model(model):
                rows.append(
                    {
                        "session": self.session,
                        "model": model,
                        "year": str(e.year),
                        "mae": e.mae,
                        "mape": e.mape,
                        "rmse": e.rmse,
                    }
                )
            actual, predicted = self.pooled(model)
            rows.append(
                {
                    "session": self.session,
                    "model": model,
                    "year": "all",
                    "mae": mae(actual, predicted),
                    "mape": mape(actual, predicted),
                    "rmse": rmse(actual, predicted),
                }
            )
        return pd.DataFrame(
            rows, columns=["session", "model", "year", "mae", "mape", "rmse"]
        )

    def monthly_table(self) -> pd.DataFrame:
        frames: List[pd.DataFrame] = list()
        for model in self.models:
            actual, predicted = self.pooled(model)
            table: pd.DataFrame = monthly_breakdown(actual, predicted).reset_index()
            table.insert(0, "model", model)
            table.insert(0, "session", self.session)
            frames.append(table)
        return pd.concat(frames, ignore_index=True)

    def summary_table(self) -> pd.DataFrame:
        """Pooled MAE/RMSE ratio and cold-season MAPE per model"""
        rows: List[dict] = list()
        for model in self.models:
            actual, predicted = self.pooled(model)
            residuals: np.ndarray = actual.to_numpy(dtype=float) - predicted
            ratio: Optional[float] = (
                mae_rmse_ratio(residuals) if np.any(residuals != 0) else None
            )
            cold: np.ndarray = np.isin(
                pd.DatetimeIndex(actual.index).month, COLD_MONTHS
            )
            cold_mape: Optional[float] = (
                cold_months_mape(actual, predicted) if cold.any() else None
            )
            rows.append(
                {
                    "session": self.session,
                    "model": model,
                    "mae_rmse_ratio": ratio,
                    "gaussian_reference": gaussian_reference(),
                    "cold_months_mape": cold_mape,
                }
            )
        return pd.DataFrame(rows)
