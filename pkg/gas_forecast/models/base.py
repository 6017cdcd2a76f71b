"""
The fit/predict contract shared by the five forecasters
"""

# Standard Library Imports
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

# Non-Standard Imports
import numpy as np

# Local Imports
from gas_forecast.common.errors import NotFittedError
from gas_forecast.common.types import Hyperparameters
from gas_forecast.features import FeatureMatrix, Scaler


class ForecastModel(ABC):
    """
    A one-day-ahead demand forecaster. `fit` learns from a training FeatureMatrix; `predict` returns MSCM forecasts
    for the rows of a FeatureMatrix standardized with the same scaler
    """

    kind: str = str()

    def __init__(self):
        self.scaler: Optional[Scaler] = None

    @property
    def is_fitted(self) -> bool:
        return self.scaler is not None

    def check_fitted(self) -> None:
        if not self.is_fitted:
            raise NotFittedError(
                f"The {self.kind} model must be fitted before predicting"
            )

    @abstractmethod
    def hyperparameters(self) -> Hyperparameters:
        """The constructor arguments that reproduce this model"""

    @abstractmethod
    def fit(self, matrix: FeatureMatrix) -> "ForecastModel":
        """Fits the model on a training matrix and returns self"""

    @abstractmethod
    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        """Forecasts in MSCM for every row of the matrix"""

    @abstractmethod
    def state_dict(self) -> Dict[str, Any]:
        """JSON-friendly fitted state"""

    @abstractmethod
    def load_state_dict(self, state: Dict[str, Any]) -> None:
        """Restores the fitted state written by state_dict"""

    def __repr__(self) -> str:
        params: str = ", ".join(f"{k}={v!r}" for k, v in self.hyperparameters().items())
        return f"{type(self).__name__}({params})"
