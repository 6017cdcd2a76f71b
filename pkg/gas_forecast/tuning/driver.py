"""
Hyperparameter selection: chronological k-fold grid search, GP marginal-likelihood maximization and AIC for the torus
model

Example Usage:
```
result = kfold_grid_search("ridge", train, GridSpec({"lam": [1e-4, 1e-2, 1.0]}))
print(result.best, result.score)
```
"""

# Standard Library Imports
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

# Non-Standard Imports
import numpy as np
import pandas as pd
from sklearn.model_selection import KFold

# Local Imports
from gas_forecast.calendar import HolidayCalendar, ITALIAN_CALENDAR
from gas_forecast.common.errors import (
    AllFailedError,
    DegenerateFoldError,
    ForecastError,
    InvalidConfigError,
)
from gas_forecast.common.log import log
from gas_forecast.common.types import Grid, HyperValue, Hyperparameters
from gas_forecast.features import FeatureMatrix
from gas_forecast.models import (
    ForecastModel,
    gp_log_marginal_likelihood,
    make_model,
    pairwise_distances,
    ridge_df,
    torus_aic,
    torus_fit,
)

DEFAULT_FOLDS: int = 5

DEFAULT_GRIDS: Dict[str, Grid] = {
    "ridge": {"lam": [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2]},
    "knn": {"k": list(range(1, 31)), "weighting": ["uniform", "inverse_distance"]},
    # sigma2 lives on the standardized target scale
    "gp": {
        "nu": [0.5, 1.5, 2.5],
        "length_scale": [1.0, 3.0, 10.0, 30.0],
        "sigma2": [0.01, 0.1, 1.0],
    },
    "mlp": {"lr": [1e-3], "batch_size": [32]},
    "torus": {"n_d": [0, 1, 2, 3, 4], "n_w": [0, 1, 2, 3, 4]},
}

T = TypeVar("T")


@dataclass(frozen=True)
class GridSpec:
    """
    Values to try per hyperparameter, the fold count, and hyperparameters held fixed across the grid
    """

    values: Grid
    folds: int = DEFAULT_FOLDS
    fixed: Hyperparameters = field(default_factory=dict)

    def __post_init__(self):
        if not self.values:
            raise InvalidConfigError("Grid must name at least one hyperparameter")
        empty: List[str] = [
            name for name, values in self.values.items() if len(values) == 0
        ]
        if empty:
            raise InvalidConfigError(f"Empty grid for: {', '.join(empty)}")
        if self.folds < 2:
            raise InvalidConfigError(f"Fold count must be >= 2, got {self.folds}")

    @property
    def points(self) -> List[Hyperparameters]:
        """Grid points in row-major order of the value lists, the order that breaks ties"""
        names: List[str] = list(self.values)
        combos = product(*(self.values[name] for name in names))
        return [dict(zip(names, combo)) for combo in combos]

    def __len__(self) -> int:
        return int(np.prod([len(v) for v in self.values.values()]))


@dataclass(frozen=True, eq=False)
class SearchResult:
    """
    The winning grid point, its score and the full score table. `df` carries the effective degrees of freedom of a
    selected ridge lambda
    """

    best: Hyperparameters
    score: float
    table: pd.DataFrame
    df: Optional[float] = None


def _map(
    func: Callable[[Hyperparameters], T],
    points: Sequence[Hyperparameters],
    n_jobs: int,
) -> List[T]:
    if n_jobs > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(func, points))
    return [func(point) for point in points]


def _argbest(scores: np.ndarray, maximize: bool = False) -> int:
    # np.nanargmin/max return the first optimum, which is the first-in-grid rule
    finite: np.ndarray = np.isfinite(scores)
    if not finite.any():
        raise AllFailedError("Every grid point failed")
    masked: np.ndarray = np.where(finite, scores, -np.inf if maximize else np.inf)
    return int(np.argmax(masked) if maximize else np.argmin(masked))


def kfold_splits(
    n: int, folds: int = DEFAULT_FOLDS
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Splits row positions 0..n-1 into contiguous, unshuffled folds in chronological order.
    The first n % folds folds hold one extra row
    :param n: Number of rows
    :param folds: Number of folds
    :return: One (training rows, validation rows) pair per fold
    """
    if folds < 2:
        raise InvalidConfigError(f"Fold count must be >= 2, got {folds}")
    if n < folds:
        raise DegenerateFoldError(f"{n} rows cannot fill {folds} folds")

    smallest: int = n // folds
    if smallest < 2:
        raise DegenerateFoldError(
            f"{n} rows over {folds} folds leaves a fold with {smallest} row(s)"
        )
    return list(KFold(n_splits=folds, shuffle=False).split(np.arange(n)))


def cv_score(
    kind: str,
    matrix: FeatureMatrix,
    hyperparameters: Hyperparameters,
    folds: int = DEFAULT_FOLDS,
) -> float:
    """
    Mean validation MSE of one hyperparameter setting across chronological folds
    :param kind: Model kind
    :param matrix: The training matrix
    :param hyperparameters: Constructor arguments of the model
    :param folds: Number of folds
    :return: The cross-validated MSE
    """
    scores: List[float] = list()
    for train_rows, validation in kfold_splits(matrix.n, folds):
        model: ForecastModel = make_model(kind, **hyperparameters)
        model.fit(matrix.subset(train_rows))
        predicted: np.ndarray = model.predict(matrix.subset(validation))
        residual: np.ndarray = predicted - matrix.y[validation]
        scores.append(float(np.mean(residual**2)))
    return float(np.mean(scores))


def kfold_grid_search(
    kind: str, matrix: FeatureMatrix, grid: GridSpec, n_jobs: int = 1
) -> SearchResult:
    """
    Scores every grid point by k-fold cross-validated MSE and returns the minimizer, the first in grid order on ties.
    Grid points whose fit fails are logged and scored NaN
    :param kind: Model kind
    :param matrix: The training matrix
    :param grid: The GridSpec
    :param n_jobs: Grid points evaluated concurrently
    :return: The SearchResult
    """
    # Surface a degenerate split before spending any fits
    kfold_splits(matrix.n, grid.folds)
    points: List[Hyperparameters] = grid.points
    log.info(
        f"Cross-validating {len(points)} {kind} grid point(s) "
        f"over {grid.folds} folds..."
    )

    def score(point: Hyperparameters) -> float:
        try:
            return cv_score(kind, matrix, {**grid.fixed, **point}, grid.folds)
        except ForecastError as e:
            log.warning(f"Grid point {point} failed for {kind}: {e}")
            return float("nan")

    scores: np.ndarray = np.array(_map(score, points, n_jobs), dtype=float)
    best: int = _argbest(scores)

    table: pd.DataFrame = pd.DataFrame(points)
    table["cv_mse"] = scores
    best_point: Hyperparameters = {**grid.fixed, **points[best]}

    df: Optional[float] = None
    if kind == "ridge":
        centered: np.ndarray = matrix.X - matrix.X.mean(axis=0)
        df = ridge_df(centered, float(best_point["lam"]))
        table["df"] = [ridge_df(centered, float(lam)) for lam in table["lam"]]
        log.info(f"Selected lambda={best_point['lam']} with df={df:.2f}")

    log.info(f"Best {kind} hyperparameters {best_point} with CV MSE {scores[best]:.6g}")
    return SearchResult(best=best_point, score=float(scores[best]), table=table, df=df)


def gp_tune(
    X: np.ndarray,
    y: np.ndarray,
    nu_grid: Sequence[HyperValue],
    length_scale_grid: Sequence[HyperValue],
    sigma2_grid: Sequence[HyperValue],
    n_jobs: int = 1,
) -> SearchResult:
    """
    Picks the GP hyperparameters maximizing the log marginal likelihood over a grid. Distances are computed once
    :param X: n x p training inputs
    :param y: n training targets, standardized
    :param nu_grid: Matérn smoothness values
    :param length_scale_grid: Length-scales
    :param sigma2_grid: Noise variances
    :param n_jobs: Grid points evaluated concurrently
    :return: The SearchResult, score being the best log marginal likelihood
    """
    grid: GridSpec = GridSpec(
        {
            "nu": list(nu_grid),
            "length_scale": list(length_scale_grid),
            "sigma2": list(sigma2_grid),
        }
    )
    points: List[Hyperparameters] = grid.points
    distances: np.ndarray = pairwise_distances(X)
    log.info(f"Maximizing GP marginal likelihood over {len(points)} grid point(s)...")

    def score(point: Hyperparameters) -> float:
        try:
            return gp_log_marginal_likelihood(
                X,
                y,
                float(point["nu"]),
                float(point["length_scale"]),
                float(point["sigma2"]),
                distances=distances,
            )
        except ForecastError as e:
            log.warning(f"GP grid point {point} infeasible: {e}")
            return float("nan")

    scores: np.ndarray = np.array(_map(score, points, n_jobs), dtype=float)
    best: int = _argbest(scores, maximize=True)

    table: pd.DataFrame = pd.DataFrame(points)
    table["log_likelihood"] = scores
    log.info(
        f"Best GP hyperparameters {points[best]} "
        f"with log likelihood {scores[best]:.6g}"
    )
    return SearchResult(best=points[best], score=float(scores[best]), table=table)


def torus_tune(
    rgd: pd.Series,
    temperature: pd.Series,
    n_d_grid: Sequence[int] = tuple(range(5)),
    n_w_grid: Sequence[int] = tuple(range(5)),
    cal: HolidayCalendar = ITALIAN_CALENDAR,
) -> SearchResult:
    """
    Picks the harmonic counts minimizing AIC of the log-demand least-squares fit
    :param rgd: Date-indexed training demand
    :param temperature: Date-indexed temperature series
    :param n_d_grid: Yearly harmonic counts
    :param n_w_grid: Weekly harmonic counts
    :param cal: The holiday calendar
    :return: The SearchResult, score being the best AIC
    """
    grid: GridSpec = GridSpec({"n_d": list(n_d_grid), "n_w": list(n_w_grid)})
    points: List[Hyperparameters] = grid.points
    log.info(f"Scoring {len(points)} torus model(s) by AIC...")

    rows: List[Dict[str, float]] = list()
    for point in points:
        state = torus_fit(
            rgd, temperature, int(point["n_d"]), int(point["n_w"]), cal
        )
        aic: float = torus_aic(state.rss, state.n, state.k)
        rows.append({"rss": state.rss, "k": state.k, "aic": aic})

    table: pd.DataFrame = pd.concat([pd.DataFrame(points), pd.DataFrame(rows)], axis=1)
    best: int = _argbest(table["aic"].to_numpy(dtype=float))
    log.info(f"Best torus harmonics {points[best]} with AIC {table['aic'][best]:.6g}")
    return SearchResult(best=points[best], score=float(table["aic"][best]), table=table)
