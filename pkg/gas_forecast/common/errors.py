"""
Exceptions raised across the module

Everything a caller can reasonably handle derives from ForecastError, which the CLI maps to exit code 1.
"""

from datetime import date
from typing import Iterable


class ForecastError(Exception):
    """Base class for data and domain errors"""


# Calendar and data
class CalendarRangeError(ForecastError, ValueError):
    pass


class DataFormatError(ForecastError, ValueError):
    pass


class MissingLagError(ForecastError, KeyError):
    def __init__(self, missing: date, t: date):
        self.missing: date = missing
        self.t: date = t
        super().__init__(
            f"No record for {missing.isoformat()} required by {t.isoformat()}"
        )

    def __str__(self) -> str:
        return self.args[0]


class EmptyMatrixError(ForecastError, ValueError):
    pass


class ZeroVarianceError(ForecastError, ValueError):
    def __init__(self, columns: Iterable[str]):
        self.columns: list[str] = list(columns)
        super().__init__(f"Zero-variance feature column(s): {', '.join(self.columns)}")


# Models
class NotFittedError(ForecastError, RuntimeError):
    pass


class SingularSystemError(ForecastError, ArithmeticError):
    pass


class NotPositiveDefiniteError(ForecastError, ArithmeticError):
    pass


class UnsupportedKernelError(ForecastError, ValueError):
    pass


class EmptyTrainingSetError(ForecastError, ValueError):
    pass


class InvalidHyperparameterError(ForecastError, ValueError):
    pass


class NonFiniteLossError(ForecastError, ArithmeticError):
    pass


class NonPositiveDemandError(ForecastError, ValueError):
    pass


class ModelFormatError(ForecastError, ValueError):
    pass


# Tuning
class DegenerateFoldError(ForecastError, ValueError):
    pass


class AllFailedError(ForecastError, RuntimeError):
    pass


# Metrics
class LengthMismatchError(ForecastError, ValueError):
    pass


class ZeroTargetError(ForecastError, ZeroDivisionError):
    pass


class ZeroRMSEError(ForecastError, ZeroDivisionError):
    pass


class ConstantSeriesError(ForecastError, ValueError):
    pass


# Error propagation
class NoColdDaysError(ForecastError, ValueError):
    pass


class ZeroDenominatorError(ForecastError, ZeroDivisionError):
    pass


# Backtest and generator
class InsufficientHistoryError(ForecastError, ValueError):
    pass


class InvalidConfigError(ForecastError, ValueError):
    pass
