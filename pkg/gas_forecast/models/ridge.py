"""
Ridge regression in closed form, beta = (X'X + lambda I)^-1 X'y, with an unpenalized intercept
"""

# Standard Library Imports
from dataclasses import dataclass
from typing import Any, Dict

# Non-Standard Imports
import numpy as np
from scipy import linalg

# Local Imports
from gas_forecast.common.errors import InvalidHyperparameterError, SingularSystemError
from gas_forecast.common.log import log
from gas_forecast.common.types import Hyperparameters
from gas_forecast.features import FeatureMatrix, Scaler
from gas_forecast.models.base import ForecastModel


@dataclass(frozen=True, eq=False)
class RidgeState:
    beta: np.ndarray
    lam: float
    intercept: float
    x_mean: np.ndarray


def ridge_solve(X: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """
    Solves the ridge normal equations (X'X + lambda I) beta = X'y with a Cholesky factorization
    :param X: n x p design matrix
    :param y: n targets
    :param lam: Regularization, >= 0
    :return: The p coefficients
    """
    if lam < 0:
        raise InvalidHyperparameterError(f"lambda must be non-negative, got {lam}")

    p: int = X.shape[1]
    if lam == 0 and np.linalg.matrix_rank(X) < p:
        raise SingularSystemError("X is rank deficient and lambda is 0")

    gram: np.ndarray = X.T @ X + lam * np.eye(p)
    try:
        factor = linalg.cho_factor(gram, lower=True)
    except linalg.LinAlgError as e:
        raise SingularSystemError(
            f"Normal equations are not positive definite: {e}"
        ) from e
    return linalg.cho_solve(factor, X.T @ y)


def ridge_fit(X: np.ndarray, y: np.ndarray, lam: float) -> RidgeState:
    """
    Fits ridge regression on centered columns and target so the intercept is not shrunk
    :param X: n x p design matrix
    :param y: n targets
    :param lam: Regularization, >= 0
    :return: The fitted RidgeState
    """
    x_mean: np.ndarray = X.mean(axis=0)
    y_mean: float = float(np.mean(y))
    beta: np.ndarray = ridge_solve(X - x_mean, y - y_mean, lam)
    return RidgeState(beta=beta, lam=float(lam), intercept=y_mean, x_mean=x_mean)


def ridge_predict(state: RidgeState, X: np.ndarray) -> np.ndarray:
    return state.intercept + (X - state.x_mean) @ state.beta


def ridge_df(X: np.ndarray, lam: float) -> float:
    """
    Effective degrees of freedom tr(X (X'X + lambda I)^-1 X'), computed from the singular values of X
    :param X: n x p design matrix
    :param lam: Regularization, >= 0
    :return: df(lambda), p at lambda = 0 for full-rank X, decreasing towards 0
    """
    if lam < 0:
        raise InvalidHyperparameterError(f"lambda must be non-negative, got {lam}")
    s2: np.ndarray = linalg.svdvals(X) ** 2
    if lam == 0:
        return float(np.count_nonzero(s2 > s2.max() * 1e-12)) if s2.size else 0.0
    return float(np.sum(s2 / (s2 + lam)))


class RidgeModel(ForecastModel):
    kind: str = "ridge"

    def __init__(self, lam: float = 1e-4):
        super().__init__()
        self.lam: float = float(lam)
        self.state: RidgeState | None = None

    def hyperparameters(self) -> Hyperparameters:
        return {"lam": self.lam}

    def fit(self, matrix: FeatureMatrix) -> "RidgeModel":
        log.info(f"Fitting ridge model with lambda={self.lam} on {matrix.n} rows...")
        self.state = ridge_fit(matrix.X, matrix.y, self.lam)
        self.scaler = matrix.scaler
        df: float = ridge_df(matrix.X - self.state.x_mean, self.lam)
        log.debug(f"Ridge df({self.lam}) = {df:.2f}")
        return self

    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        self.check_fitted()
        return ridge_predict(self.state, matrix.X)

    def state_dict(self) -> Dict[str, Any]:
        self.check_fitted()
        return {
            "beta": self.state.beta.tolist(),
            "intercept": self.state.intercept,
            "x_mean": self.state.x_mean.tolist(),
            "scaler": self.scaler.to_dict(),
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.state = RidgeState(
            beta=np.asarray(state["beta"], dtype=float),
            lam=self.lam,
            intercept=float(state["intercept"]),
            x_mean=np.asarray(state["x_mean"], dtype=float),
        )
        self.scaler = Scaler.from_dict(state["scaler"])
