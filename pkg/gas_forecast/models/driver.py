"""Creates a master function for building any of the forecasters by name"""

from gas_forecast.common.errors import InvalidConfigError
from gas_forecast.models.base import ForecastModel
from gas_forecast.models.gp import GaussianProcessModel
from gas_forecast.models.knn import KNNModel
from gas_forecast.models.mlp import MLPModel
from gas_forecast.models.ridge import RidgeModel
from gas_forecast.models.torus import TorusModel

MODELS: set[str] = {
    "ridge",
    "gp",
    "knn",
    "mlp",
    "torus",
}


def make_model(kind: str, **hyperparameters) -> ForecastModel:
    if kind not in MODELS:
        raise InvalidConfigError(
            f"Unknown model '{kind}', must be one of {sorted(MODELS)}."
        )

    if kind == "ridge":
        return RidgeModel(**hyperparameters)
    elif kind == "gp":
        return GaussianProcessModel(**hyperparameters)
    elif kind == "knn":
        return KNNModel(**hyperparameters)
    elif kind == "mlp":
        return MLPModel(**hyperparameters)
    elif kind == "torus":
        return TorusModel(**hyperparameters)
