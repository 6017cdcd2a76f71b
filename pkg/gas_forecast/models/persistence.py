"""
Saves fitted forecasters to a self-describing JSON document and loads them back

Floats are written with their shortest round-trip repr, so a reloaded model predicts bit-identically.
"""

# Standard Library Imports
import json
from typing import Any, Dict

# Local Imports
from gas_forecast.common.errors import ForecastError, ModelFormatError
from gas_forecast.common.functions import ensure_parent_dir
from gas_forecast.common.log import log
from gas_forecast.models.base import ForecastModel
from gas_forecast.models.driver import MODELS, make_model

FORMAT_VERSION: int = 1


def model_to_dict(model: ForecastModel) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "hyperparameters": model.hyperparameters(),
        "state": model.state_dict(),
    }


def model_from_dict(document: Dict[str, Any]) -> ForecastModel:
    """
    Rebuilds a fitted model from the document written by model_to_dict
    :param document: The parsed JSON document
    :return: The fitted model
    """
    try:
        version: int = document["format_version"]
        kind: str = document["kind"]
        hyperparameters: Dict[str, Any] = document["hyperparameters"]
        state: Dict[str, Any] = document["state"]
    except (KeyError, TypeError) as e:
        raise ModelFormatError(f"Not a saved model document, missing {e}") from e

    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"Unsupported model format version {version}, expected {FORMAT_VERSION}"
        )
    if kind not in MODELS:
        raise ModelFormatError(f"Unknown model kind '{kind}'")

    try:
        model: ForecastModel = make_model(kind, **hyperparameters)
        model.load_state_dict(state)
    except ForecastError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"Malformed {kind} state: {e}") from e
    return model


def save_model(model: ForecastModel, filepath: str) -> None:
    """
    Writes a fitted model to JSON
    :param model: A fitted ForecastModel
    :param filepath: Destination path
    """
    document: Dict[str, Any] = model_to_dict(model)
    ensure_parent_dir(filepath)
    log.info(f"Saving {model.kind} model to {filepath}...")
    with open(filepath, "w") as f:
        json.dump(document, f)


def load_model(filepath: str) -> ForecastModel:
    """
    Reads a model saved by save_model
    :param filepath: The JSON path
    :return: The fitted model
    """
    log.info(f"Loading model from {filepath}...")
    try:
        with open(filepath, "r") as f:
            document: Dict[str, Any] = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ModelFormatError(f"Could not read model file {filepath}: {e}") from e
    return model_from_dict(document)
