"""
K-nearest-neighbours regression with uniform or inverse-distance weights
"""

# Standard Library Imports
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

# Non-Standard Imports
import numpy as np
from sklearn.neighbors import KNeighborsRegressor

# Local Imports
from gas_forecast.common.errors import (
    EmptyTrainingSetError,
    InvalidHyperparameterError,
)
from gas_forecast.common.log import log
from gas_forecast.common.types import Hyperparameters
from gas_forecast.features import FeatureMatrix, Scaler
from gas_forecast.models.base import ForecastModel

WEIGHTINGS: Tuple[str, ...] = ("uniform", "inverse_distance")

# Names of the weightings on the estimator
_ESTIMATOR_WEIGHTS: Dict[str, str] = {
    "uniform": "uniform",
    "inverse_distance": "distance",
}


@dataclass(frozen=True, eq=False)
class KNNState:
    X_train: np.ndarray
    y_train: np.ndarray
    k: int
    weighting: str
    estimator: KNeighborsRegressor


def _check_weighting(weighting: str) -> None:
    if weighting not in WEIGHTINGS:
        raise InvalidHyperparameterError(
            f"Unknown weighting '{weighting}', must be one of {WEIGHTINGS}"
        )


def knn_fit(
    X: np.ndarray, y: np.ndarray, k: int, weighting: str = "uniform"
) -> KNNState:
    """
    Indexes the training set after checking the neighbour count
    :param X: n x p training inputs
    :param y: n training targets
    :param k: Number of neighbours, 1 <= k <= n
    :param weighting: "uniform" or "inverse_distance"
    :return: The KNNState
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        raise EmptyTrainingSetError("KNN needs at least one training row")
    _check_weighting(weighting)
    if not 1 <= k <= X.shape[0]:
        raise InvalidHyperparameterError(f"K={k} outside [1, {X.shape[0]}]")

    y = np.asarray(y, dtype=float)
    # Brute force keeps the neighbour search exact on 21 standardized columns
    estimator: KNeighborsRegressor = KNeighborsRegressor(
        n_neighbors=int(k),
        weights=_ESTIMATOR_WEIGHTS[weighting],
        algorithm="brute",
        metric="euclidean",
    ).fit(X, y)
    return KNNState(
        X_train=X, y_train=y, k=int(k), weighting=weighting, estimator=estimator
    )


def knn_predict(state: KNNState, X_star: np.ndarray) -> np.ndarray:
    """
    Averages the targets of the k nearest training rows. With inverse-distance weights,
    a query that coincides with training rows gets the mean of those rows' targets
    :param state: The fitted KNNState
    :param X_star: m x p query inputs
    :return: m predictions
    """
    query: np.ndarray = np.atleast_2d(np.asarray(X_star, dtype=float))
    return np.asarray(state.estimator.predict(query), dtype=float).ravel()


class KNNModel(ForecastModel):
    kind: str = "knn"

    def __init__(self, k: int = 5, weighting: str = "inverse_distance"):
        super().__init__()
        _check_weighting(weighting)
        self.k: int = int(k)
        self.weighting: str = weighting
        self.state: Optional[KNNState] = None

    def hyperparameters(self) -> Hyperparameters:
        return {"k": self.k, "weighting": self.weighting}

    def fit(self, matrix: FeatureMatrix) -> "KNNModel":
        log.info(
            f"Fitting KNN model with K={self.k}, weighting={self.weighting} "
            f"on {matrix.n} rows..."
        )
        self.state = knn_fit(matrix.X, matrix.y, self.k, self.weighting)
        self.scaler = matrix.scaler
        return self

    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        self.check_fitted()
        return knn_predict(self.state, matrix.X)

    def state_dict(self) -> Dict[str, Any]:
        self.check_fitted()
        return {
            "X_train": self.state.X_train.tolist(),
            "y_train": self.state.y_train.tolist(),
            "scaler": self.scaler.to_dict(),
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.state = knn_fit(
            np.asarray(state["X_train"], dtype=float),
            np.asarray(state["y_train"], dtype=float),
            self.k,
            self.weighting,
        )
        self.scaler = Scaler.from_dict(state["scaler"])
