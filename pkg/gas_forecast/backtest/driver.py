"""
This file runs the expanding-window backtest: for every test year, every model is tuned and fitted on all history up to
the previous December 31 and forecasts each test day one day ahead, once per temperature session

Example Usage:
```
plan = expanding_splits(dataset, [2015, 2016, 2017], models=["ridge", "torus"])
result = asyncio.run(run_backtest(plan, dataset))
write_backtest_reports(result, "output")
```
"""

# Standard Library Imports
import asyncio
import json
from dataclasses import dataclass, field
from datetime import date
from typing import Dict, List, Optional, Sequence, Tuple
import os

# Non-Standard Imports
import numpy as np
import pandas as pd

# Local Imports
from gas_forecast.calendar import HolidayCalendar, ITALIAN_CALENDAR
from gas_forecast.common.errors import (
    AllFailedError,
    EmptyMatrixError,
    ForecastError,
    InsufficientHistoryError,
    InvalidConfigError,
    NonFiniteLossError,
)
from gas_forecast.common.functions import annotate_errors, write_report_csv
from gas_forecast.common.log import log
from gas_forecast.common.types import Grid, Hyperparameters, TemperatureSource
from gas_forecast.errorprop import (
    ErrorPropParams,
    estimate_params,
    performance_limit,
    predicted_rmse,
)
from gas_forecast.features import FeatureMatrix, build_matrix
from gas_forecast.metrics import EvaluationReport, ModelEvaluation
from gas_forecast.models import MODELS, ForecastModel, make_model
from gas_forecast.tuning import (
    DEFAULT_GRIDS,
    GridSpec,
    gp_tune,
    kfold_grid_search,
    torus_tune,
)

SESSIONS: Tuple[TemperatureSource, ...] = ("actual", "forecast")


@dataclass(frozen=True)
class Split:
    """Train on [train_start, Dec 31 of test_year - 1], test on the whole test year"""

    train_start: date
    test_year: int

    @property
    def train_range(self) -> Tuple[date, date]:
        return self.train_start, date(self.test_year - 1, 12, 31)

    @property
    def test_range(self) -> Tuple[date, date]:
        return date(self.test_year, 1, 1), date(self.test_year, 12, 31)


@dataclass(frozen=True)
class BacktestPlan:
    """
    The splits, models and temperature sessions of a backtest. `grids` maps a model kind to the hyperparameter values
    to tune over; `fixed` holds hyperparameters that are never tuned, e.g. MLP epochs and seed
    """

    splits: Tuple[Split, ...]
    models: Tuple[str, ...] = tuple(sorted(MODELS))
    sessions: Tuple[TemperatureSource, ...] = SESSIONS
    grids: Dict[str, Grid] = field(default_factory=lambda: dict(DEFAULT_GRIDS))
    fixed: Dict[str, Hyperparameters] = field(default_factory=dict)
    folds: int = 5
    n_jobs: int = 1

    def __post_init__(self):
        if not self.splits:
            raise InvalidConfigError("A backtest needs at least one split")
        years: List[int] = [s.test_year for s in self.splits]
        if len(set(years)) != len(years):
            raise InvalidConfigError(f"Test years overlap: {years}")
        for s in self.splits:
            train_start, train_end = s.train_range
            if not train_end < s.test_range[0] or train_start > train_end:
                raise InvalidConfigError(
                    f"Training range of split {s.test_year} does not end before "
                    f"its test year"
                )
        unknown: List[str] = [m for m in self.models if m not in MODELS]
        if unknown:
            raise InvalidConfigError(f"Unknown model(s): {', '.join(unknown)}")
        bad_sessions: List[str] = [s for s in self.sessions if s not in SESSIONS]
        if bad_sessions or not self.sessions:
            raise InvalidConfigError(
                f"Sessions must be a non-empty subset of {SESSIONS}, "
                f"got {list(self.sessions)}"
            )

    def grid_for(self, kind: str) -> Grid:
        return self.grids.get(kind, DEFAULT_GRIDS[kind])


@dataclass(eq=False)
class BacktestResult:
    """Per-session evaluation reports, the tuned hyperparameters, and the session comparison when both ran"""

    reports: Dict[str, EvaluationReport]
    hyperparameters: pd.DataFrame
    comparison: Optional[pd.DataFrame] = None


def _covers_year(index: pd.DatetimeIndex, year: int) -> bool:
    days: pd.DatetimeIndex = pd.date_range(
        date(year, 1, 1), date(year, 12, 31), freq="D"
    )
    return bool(days.isin(index).all())


def expanding_splits(
    dataset: pd.DataFrame,
    test_years: Sequence[int],
    models: Sequence[str] = tuple(sorted(MODELS)),
    sessions: Sequence[TemperatureSource] = SESSIONS,
    grids: Optional[Dict[str, Grid]] = None,
    fixed: Optional[Dict[str, Hyperparameters]] = None,
    folds: int = 5,
    n_jobs: int = 1,
) -> BacktestPlan:
    """
    Builds one expanding-window split per test year: train from the first dataset day to the day before the test year
    :param dataset: A date-indexed dataset frame
    :param test_years: The test years
    :param models: Model kinds to evaluate
    :param sessions: Temperature sessions to run
    :param grids: Hyperparameter grids per model kind, defaulting to DEFAULT_GRIDS
    :param fixed: Untuned hyperparameters per model kind
    :param folds: Cross-validation fold count
    :param n_jobs: Concurrent workers
    :return: The BacktestPlan
    """
    if len(dataset) == 0:
        raise InsufficientHistoryError("The dataset is empty")
    first: date = dataset.index[0].date()

    splits: List[Split] = list()
    for year in sorted(test_years):
        if not _covers_year(dataset.index, year):
            raise InsufficientHistoryError(
                f"Test year {year} is not fully covered by the dataset"
            )
        if first > date(year - 1, 1, 1):
            raise InsufficientHistoryError(
                f"Test year {year} needs a full year of training history, "
                f"data starts {first}"
            )
        splits.append(Split(train_start=first, test_year=int(year)))

    return BacktestPlan(
        splits=tuple(splits),
        models=tuple(models),
        sessions=tuple(sessions),
        grids={**DEFAULT_GRIDS, **(grids or {})},
        fixed=dict(fixed or {}),
        folds=folds,
        n_jobs=n_jobs,
    )


def _build_matrices(
    dataset: pd.DataFrame,
    split: Split,
    session: TemperatureSource,
    cal: HolidayCalendar,
) -> Tuple[FeatureMatrix, FeatureMatrix]:
    try:
        train: FeatureMatrix = build_matrix(
            dataset, split.train_range, session, cal=cal
        )
    except EmptyMatrixError as e:
        raise InsufficientHistoryError(
            f"No training row before {split.test_year}; "
            f"similar-day lags need data from the year before: {e}"
        ) from e
    test: FeatureMatrix = build_matrix(
        dataset, split.test_range, session, scaler=train.scaler, cal=cal
    )
    return train, test


def tune_model(
    kind: str, train: FeatureMatrix, plan: BacktestPlan
) -> Tuple[Hyperparameters, Optional[float]]:
    """
    Selects the hyperparameters of one model on a training matrix. A grid with a single point is used as is
    :param kind: Model kind
    :param train: The training matrix
    :param plan: The BacktestPlan holding grids and fixed values
    :return: (hyperparameters, tuning score or None when nothing was tuned)
    """
    grid: GridSpec = GridSpec(
        plan.grid_for(kind), folds=plan.folds, fixed=plan.fixed.get(kind, {})
    )
    if len(grid) == 1:
        return {**grid.fixed, **grid.points[0]}, None

    if kind == "gp":
        result = gp_tune(
            train.X,
            train.scaler.scale_target(train.y),
            grid.values["nu"],
            grid.values["length_scale"],
            grid.values["sigma2"],
            n_jobs=plan.n_jobs,
        )
    elif kind == "torus":
        result = torus_tune(
            pd.Series(train.y, index=train.dates),
            train.temperature,
            grid.values["n_d"],
            grid.values["n_w"],
        )
    else:
        result = kfold_grid_search(kind, train, grid, n_jobs=plan.n_jobs)
    return {**grid.fixed, **result.best}, result.score


@annotate_errors("split {year}, model {kind}, session {session}")
def evaluate_model(
    *,
    kind: str,
    session: str,
    year: int,
    train: FeatureMatrix,
    test: FeatureMatrix,
    plan: BacktestPlan,
) -> Tuple[ModelEvaluation, Hyperparameters, Optional[float]]:
    """
    Tunes, fits and runs one model over one test year
    :return: (evaluation, selected hyperparameters, tuning score)
    """
    hyperparameters, score = tune_model(kind, train, plan)
    model: ForecastModel = make_model(kind, **hyperparameters).fit(train)
    predicted: np.ndarray = model.predict(test)
    if not np.isfinite(predicted).all():
        raise NonFiniteLossError(f"{kind} produced non-finite forecasts")
    actual: pd.Series = pd.Series(test.y, index=test.dates, name="rgd")
    evaluation: ModelEvaluation = ModelEvaluation(
        model=kind, session=session, year=year, actual=actual, predicted=predicted
    )
    log.info(
        f"{kind} {session} {year}: RMSE {evaluation.rmse:.4f}, "
        f"MAE {evaluation.mae:.4f}"
    )
    return evaluation, hyperparameters, score


async def run_backtest(
    plan: BacktestPlan, dataset: pd.DataFrame, cal: HolidayCalendar = ITALIAN_CALENDAR
) -> BacktestResult:
    """
    Runs every (session, split, model) of the plan. Models run concurrently in worker threads; a model that fails on a
    split is dropped from that split's rows with a warning
    :param plan: The BacktestPlan
    :param dataset: A date-indexed dataset frame, with temp_actual when the actual session runs
    :param cal: The holiday calendar
    :return: The BacktestResult
    """
    tasks: List = list()
    for session in plan.sessions:
        for split in plan.splits:
            log.info(
                f"Building {session}-temperature matrices "
                f"for test year {split.test_year}..."
            )
            train, test = _build_matrices(dataset, split, session, cal)
            for kind in plan.models:
                tasks.append(
                    asyncio.to_thread(
                        evaluate_model,
                        kind=kind,
                        session=session,
                        year=split.test_year,
                        train=train,
                        test=test,
                        plan=plan,
                    )
                )

    outcomes: List = await asyncio.gather(*tasks, return_exceptions=True)

    reports: Dict[str, EvaluationReport] = {
        session: EvaluationReport(session=session) for session in plan.sessions
    }
    tuned: List[dict] = list()
    for outcome in outcomes:
        if isinstance(outcome, ForecastError):
            # Already logged with its split/model context
            continue
        if isinstance(outcome, BaseException):
            raise outcome
        evaluation, hyperparameters, score = outcome
        reports[evaluation.session].evaluations.append(evaluation)
        tuned.append(
            {
                "session": evaluation.session,
                "year": evaluation.year,
                "model": evaluation.model,
                "hyperparameters": json.dumps(hyperparameters, sort_keys=True),
                "tuning_score": score,
            }
        )

    if not tuned:
        raise AllFailedError("Every model failed on every split")

    comparison: Optional[pd.DataFrame] = None
    if set(SESSIONS) <= set(plan.sessions) and "temp_actual" in dataset.columns:
        comparison = session_comparison(
            reports["actual"], reports["forecast"], dataset, plan
        )

    return BacktestResult(
        reports=reports, hyperparameters=pd.DataFrame(tuned), comparison=comparison
    )


def session_comparison(
    actual_report: EvaluationReport,
    forecast_report: EvaluationReport,
    dataset: pd.DataFrame,
    plan: BacktestPlan,
) -> pd.DataFrame:
    """
    Predicts each forecast-temperature RMSE from the matching true-temperature RMSE and the performance limit of the
    test period, and sets it beside the measured one
    :param actual_report: The true-temperature session
    :param forecast_report: The forecast-temperature session
    :param dataset: The dataset, with both temperature columns
    :param plan: The BacktestPlan
    :return: A frame with one row per (model, year) and per model over all test years
    """
    periods: Dict[str, pd.DataFrame] = {
        str(s.test_year): dataset.loc[str(s.test_year)] for s in plan.splits
    }
    periods["all"] = pd.concat(periods.values())
    params: Dict[str, ErrorPropParams] = {
        period: estimate_params(frame) for period, frame in periods.items()
    }

    keys: List[str] = ["model", "year"]
    measured_actual: pd.DataFrame = actual_report.yearly_table().set_index(keys)
    measured_forecast: pd.DataFrame = forecast_report.yearly_table().set_index(keys)

    rows: List[dict] = list()
    for (model, year), row in measured_actual.iterrows():
        if (model, year) not in measured_forecast.index:
            continue
        predicted: float = predicted_rmse(float(row["rmse"]) ** 2, params[year])
        measured: float = float(measured_forecast.loc[(model, year), "rmse"])
        rows.append(
            {
                "model": model,
                "year": year,
                "rmse_actual": row["rmse"],
                "performance_limit": performance_limit(params[year]),
                "predicted_rmse": predicted,
                "rmse_forecast": measured,
                "relative_gap": (measured - predicted) / predicted,
            }
        )
    return pd.DataFrame(rows)


def audit_no_lookahead(
    model: ForecastModel,
    dataset: pd.DataFrame,
    days: Sequence[date],
    temperature_source: TemperatureSource,
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> float:
    """
    Re-forecasts each day from a copy of the dataset cut at that day, with that day's demand blanked, and compares it
    to the forecast made from the full dataset
    :param model: A fitted model
    :param dataset: The full dataset frame
    :param days: Test days to audit
    :param temperature_source: The temperature session
    :param cal: The holiday calendar
    :return: The largest absolute difference, inf if a truncated forecast came out non-finite
    """
    worst: float = 0.0
    for t in days:
        full: FeatureMatrix = build_matrix(
            dataset, (t, t), temperature_source, scaler=model.scaler, cal=cal
        )
        truncated_data: pd.DataFrame = dataset.loc[: pd.Timestamp(t)].copy()
        truncated_data.loc[pd.Timestamp(t), "rgd"] = np.nan
        truncated: FeatureMatrix = build_matrix(
            truncated_data, (t, t), temperature_source, scaler=model.scaler, cal=cal
        )

        difference: np.ndarray = np.abs(model.predict(full) - model.predict(truncated))
        difference = np.where(np.isfinite(difference), difference, np.inf)
        worst = max(worst, float(np.max(difference)))
    return worst


def residual_table(report: EvaluationReport) -> pd.DataFrame:
    """Daily actual demand, forecast and residual of every evaluation, the data behind the residual figures"""
    frames: List[pd.DataFrame] = [
        pd.DataFrame(
            {
                "date": e.actual.index.strftime("%Y-%m-%d"),
                "model": e.model,
                "year": e.year,
                "actual": e.actual.to_numpy(dtype=float),
                "predicted": e.predicted,
                "residual": e.residuals.to_numpy(dtype=float),
            }
        )
        for e in report.evaluations
    ]
    return pd.concat(frames, ignore_index=True)


def write_backtest_reports(
    result: BacktestResult, output_dir: str, timestamp: bool = True
) -> List[str]:
    """
    Writes the per-session error tables, monthly tables, summaries and residuals, the tuned hyperparameters and
    the session comparison
    :param result: The BacktestResult
    :param output_dir: Destination directory
    :param timestamp: Whether to prefix each CSV with a `# generated` line
    :return: The written file paths
    """
    written: List[str] = list()

    def write(df: pd.DataFrame, name: str) -> None:
        path: str = os.path.join(output_dir, name)
        write_report_csv(df, path, timestamp=timestamp)
        written.append(path)

    for session, report in result.reports.items():
        if not report.evaluations:
            log.warning(f"No evaluation survived in the {session} session")
            continue
        write(report.yearly_table(), f"errors_{session}.csv")
        write(report.monthly_table(), f"monthly_{session}.csv")
        write(report.summary_table(), f"summary_{session}.csv")
        write(residual_table(report), f"residuals_{session}.csv")

    write(result.hyperparameters, "hyperparameters.csv")
    if result.comparison is not None:
        write(result.comparison, "rmse_comparison.csv")
    return written
