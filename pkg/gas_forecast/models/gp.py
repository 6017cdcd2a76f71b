"""
Gaussian process regression with an isotropic half-integer Matérn kernel on the standardized features

Example Usage:
```
state = gp_fit(X, z, nu=1.5, length_scale=10.0, sigma2=0.1)
z_star = gp_predict(state, X_star)
```
"""

# Standard Library Imports
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

# Non-Standard Imports
import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist

# Local Imports
from gas_forecast.common.errors import (
    InvalidHyperparameterError,
    NotPositiveDefiniteError,
    UnsupportedKernelError,
)
from gas_forecast.common.log import log
from gas_forecast.common.types import Hyperparameters
from gas_forecast.features import FeatureMatrix, Scaler
from gas_forecast.models.base import ForecastModel

SUPPORTED_NU: Tuple[float, ...] = (0.5, 1.5, 2.5)
JITTER: float = 1e-10

SQRT3: float = np.sqrt(3.0)
SQRT5: float = np.sqrt(5.0)


@dataclass(frozen=True, eq=False)
class GPState:
    nu: float
    length_scale: float
    sigma2: float
    X_train: np.ndarray
    c: np.ndarray


def _check_params(
    nu: float, length_scale: float, sigma2: Optional[float] = None
) -> None:
    if float(nu) not in SUPPORTED_NU:
        raise UnsupportedKernelError(
            f"Matérn nu={nu} not supported, must be one of {SUPPORTED_NU}"
        )
    if not length_scale > 0:
        raise InvalidHyperparameterError(
            f"Length-scale must be positive, got {length_scale}"
        )
    if sigma2 is not None and sigma2 < 0:
        raise InvalidHyperparameterError(
            f"Noise variance must be non-negative, got {sigma2}"
        )


def matern_kernel(r, nu: float, length_scale: float):
    """
    Closed-form Matérn correlation for nu in {0.5, 1.5, 2.5}
    :param r: A distance >= 0, or an array of them
    :param nu: The smoothness
    :param length_scale: The length-scale l > 0
    :return: kappa(r), with kappa(0) = 1
    """
    _check_params(nu, length_scale)
    s: np.ndarray = np.asarray(r, dtype=float) / length_scale

    if nu == 0.5:
        k = np.exp(-s)
    elif nu == 1.5:
        k = (1.0 + SQRT3 * s) * np.exp(-SQRT3 * s)
    else:
        k = (1.0 + SQRT5 * s + 5.0 * s**2 / 3.0) * np.exp(-SQRT5 * s)

    return float(k) if np.ndim(k) == 0 else k


def pairwise_distances(A: np.ndarray, B: Optional[np.ndarray] = None) -> np.ndarray:
    """Euclidean distances between the rows of A and B (A itself when B is omitted)"""
    return cdist(A, A if B is None else B, metric="euclidean")


def gram(A: np.ndarray, B: np.ndarray, nu: float, length_scale: float) -> np.ndarray:
    return matern_kernel(pairwise_distances(A, B), nu, length_scale)


def _factor(K: np.ndarray, sigma2: float) -> Tuple[np.ndarray, bool]:
    # One retry with 1e-10 * mean(diag) on the diagonal
    A: np.ndarray = K + sigma2 * np.eye(K.shape[0])
    try:
        return linalg.cho_factor(A, lower=True)
    except linalg.LinAlgError:
        jitter: float = JITTER * float(np.mean(np.diag(A)))
        log.debug(f"Cholesky failed, retrying with jitter {jitter:.3g}")
        try:
            return linalg.cho_factor(A + jitter * np.eye(K.shape[0]), lower=True)
        except linalg.LinAlgError as e:
            raise NotPositiveDefiniteError(
                f"Gram matrix + {sigma2} I is not positive definite after jitter: {e}"
            ) from e


def gp_fit(
    X: np.ndarray,
    y: np.ndarray,
    nu: float,
    length_scale: float,
    sigma2: float,
    distances: Optional[np.ndarray] = None,
) -> GPState:
    """
    Computes the posterior-mean coefficients c = (Sigma + sigma2 I)^-1 y
    :param X: n x p training inputs
    :param y: n training targets, usually standardized
    :param nu: Matérn smoothness in {0.5, 1.5, 2.5}
    :param length_scale: The length-scale l > 0
    :param sigma2: Noise variance >= 0
    :param distances: Optional precomputed n x n distance matrix of X
    :return: The fitted GPState
    """
    _check_params(nu, length_scale, sigma2)
    D: np.ndarray = pairwise_distances(X) if distances is None else distances
    factor = _factor(matern_kernel(D, nu, length_scale), sigma2)
    c: np.ndarray = linalg.cho_solve(factor, np.asarray(y, dtype=float))
    return GPState(
        nu=float(nu),
        length_scale=float(length_scale),
        sigma2=float(sigma2),
        X_train=np.asarray(X),
        c=c,
    )


def gp_predict(state: GPState, X_star: np.ndarray) -> np.ndarray:
    """f(x*) = sum_i c_i kappa(x*, x_i), on the scale of the training targets"""
    K_star: np.ndarray = gram(
        np.atleast_2d(X_star), state.X_train, state.nu, state.length_scale
    )
    return K_star @ state.c


def gp_log_marginal_likelihood(
    X: np.ndarray,
    y: np.ndarray,
    nu: float,
    length_scale: float,
    sigma2: float,
    distances: Optional[np.ndarray] = None,
) -> float:
    """
    Zero-mean Gaussian log-density of y, -1/2 y'A^-1 y - 1/2 log det A - n/2 log 2 pi with A = Sigma + sigma2 I
    :param X: n x p training inputs
    :param y: n training targets, as given
    :param nu: Matérn smoothness
    :param length_scale: The length-scale l > 0
    :param sigma2: Noise variance >= 0
    :param distances: Optional precomputed n x n distance matrix of X
    :return: The log marginal likelihood
    """
    _check_params(nu, length_scale, sigma2)
    y = np.asarray(y, dtype=float)
    D: np.ndarray = pairwise_distances(X) if distances is None else distances
    factor = _factor(matern_kernel(D, nu, length_scale), sigma2)

    alpha: np.ndarray = linalg.cho_solve(factor, y)
    log_det: float = 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
    n: int = y.shape[0]
    return float(-0.5 * y @ alpha - 0.5 * log_det - 0.5 * n * np.log(2.0 * np.pi))


class GaussianProcessModel(ForecastModel):
    """
    GP regressor over the standardized covariates. With `normalize` the target is standardized with the training
    scaler so the zero prior mean sits at the training average
    """

    kind: str = "gp"

    def __init__(
        self,
        nu: float = 1.5,
        length_scale: float = 10.0,
        sigma2: float = 0.1,
        normalize: bool = True,
    ):
        super().__init__()
        _check_params(nu, length_scale, sigma2)
        self.nu: float = float(nu)
        self.length_scale: float = float(length_scale)
        self.sigma2: float = float(sigma2)
        self.normalize: bool = normalize
        self.state: Optional[GPState] = None

    def hyperparameters(self) -> Hyperparameters:
        return {
            "nu": self.nu,
            "length_scale": self.length_scale,
            "sigma2": self.sigma2,
        }

    def fit(self, matrix: FeatureMatrix) -> "GaussianProcessModel":
        log.info(
            f"Fitting GP model with nu={self.nu}, l={self.length_scale}, "
            f"sigma2={self.sigma2} on {matrix.n} rows..."
        )
        z: np.ndarray = (
            matrix.scaler.scale_target(matrix.y) if self.normalize else matrix.y
        )
        self.state = gp_fit(matrix.X, z, self.nu, self.length_scale, self.sigma2)
        self.scaler = matrix.scaler
        return self

    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        self.check_fitted()
        z: np.ndarray = gp_predict(self.state, matrix.X)
        return self.scaler.unscale_target(z) if self.normalize else z

    def state_dict(self) -> Dict[str, Any]:
        self.check_fitted()
        return {
            "normalize": self.normalize,
            "X_train": self.state.X_train.tolist(),
            "c": self.state.c.tolist(),
            "scaler": self.scaler.to_dict(),
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.normalize = bool(state["normalize"])
        self.state = GPState(
            nu=self.nu,
            length_scale=self.length_scale,
            sigma2=self.sigma2,
            X_train=np.asarray(state["X_train"], dtype=float),
            c=np.asarray(state["c"], dtype=float),
        )
        self.scaler = Scaler.from_dict(state["scaler"])
