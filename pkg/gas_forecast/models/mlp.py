"""
Feed-forward network with ReLU hidden layers and a linear output, trained on MSE with ADAM

Example Usage:
```
state = mlp_fit(X, y, lr=1e-3, batch_size=32, epochs=1000, seed=0)
y_hat = mlp_predict(state, X_star)
```
"""

# Standard Library Imports
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

# Non-Standard Imports
import numpy as np

# Local Imports
from gas_forecast.common.errors import InvalidHyperparameterError, NonFiniteLossError
from gas_forecast.common.log import log
from gas_forecast.common.types import Hyperparameters
from gas_forecast.features import FeatureMatrix, Scaler
from gas_forecast.models.base import ForecastModel

HIDDEN_WIDTHS: Tuple[int, ...] = (24, 12, 4)

ADAM_BETA1: float = 0.9
ADAM_BETA2: float = 0.999
ADAM_EPS: float = 1e-8

# (weights, bias) per layer
Params = List[Tuple[np.ndarray, np.ndarray]]


@dataclass
class AdamState:
    m: Params
    v: Params
    step: int = 0

    @classmethod
    def zeros_like(cls, params: Params) -> "AdamState":
        return cls(
            m=[(np.zeros_like(W), np.zeros_like(b)) for W, b in params],
            v=[(np.zeros_like(W), np.zeros_like(b)) for W, b in params],
        )


@dataclass
class MLPState:
    widths: List[int]
    params: Params
    adam: AdamState
    lr: float
    batch_size: int
    epochs: int
    y_mean: float
    y_std: float
    loss_history: List[float] = field(default_factory=list)


def layer_widths(p: int) -> List[int]:
    return [p, *HIDDEN_WIDTHS, 1]


def init_params(widths: Sequence[int], rng: np.random.Generator) -> Params:
    """
    He-normal weights and zero biases
    :param widths: Layer widths, input first
    :param rng: The random generator
    :return: One (W, b) pair per layer, W of shape fan_in x fan_out
    """
    return [
        (
            rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)),
            np.zeros(fan_out),
        )
        for fan_in, fan_out in zip(widths[:-1], widths[1:])
    ]


def forward(
    params: Params, X: np.ndarray
) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """
    Runs the network
    :param params: The layer parameters
    :param X: n x p inputs
    :return: (n outputs, layer inputs, pre-activations), the last two kept for backpropagation
    """
    inputs: List[np.ndarray] = list()
    pre: List[np.ndarray] = list()
    a: np.ndarray = X
    for i, (W, b) in enumerate(params):
        inputs.append(a)
        z: np.ndarray = a @ W + b
        pre.append(z)
        a = z if i == len(params) - 1 else np.maximum(z, 0.0)
    return a[:, 0], inputs, pre


def loss_and_gradients(
    params: Params, X: np.ndarray, y: np.ndarray
) -> Tuple[float, Params]:
    """
    Mean squared error of the network on a batch and its gradient with respect to every parameter
    :param params: The layer parameters
    :param X: n x p batch inputs
    :param y: n batch targets
    :return: (loss, gradients shaped like params)
    """
    out, inputs, pre = forward(params, X)
    residual: np.ndarray = out - y
    loss: float = float(np.mean(residual**2))

    grads: Params = [None] * len(params)
    delta: np.ndarray = (2.0 / y.shape[0]) * residual[:, None]
    for i in range(len(params) - 1, -1, -1):
        W, _ = params[i]
        grads[i] = (inputs[i].T @ delta, delta.sum(axis=0))
        if i > 0:
            delta = (delta @ W.T) * (pre[i - 1] > 0.0)
    return loss, grads


def adam_step(params: Params, grads: Params, adam: AdamState, lr: float) -> Params:
    """One bias-corrected ADAM update; updates the moment accumulators in place"""
    adam.step += 1
    c1: float = 1.0 - ADAM_BETA1**adam.step
    c2: float = 1.0 - ADAM_BETA2**adam.step

    updated: Params = list()
    for i, ((W, b), (gW, gb)) in enumerate(zip(params, grads)):
        (mW, mb), (vW, vb) = adam.m[i], adam.v[i]
        mW = ADAM_BETA1 * mW + (1 - ADAM_BETA1) * gW
        mb = ADAM_BETA1 * mb + (1 - ADAM_BETA1) * gb
        vW = ADAM_BETA2 * vW + (1 - ADAM_BETA2) * gW**2
        vb = ADAM_BETA2 * vb + (1 - ADAM_BETA2) * gb**2
        adam.m[i], adam.v[i] = (mW, mb), (vW, vb)
        updated.append(
            (
                W - lr * (mW / c1) / (np.sqrt(vW / c2) + ADAM_EPS),
                b - lr * (mb / c1) / (np.sqrt(vb / c2) + ADAM_EPS),
            )
        )
    return updated


def _all_finite(params: Params) -> bool:
    return all(np.isfinite(W).all() and np.isfinite(b).all() for W, b in params)


def mlp_fit(
    X: np.ndarray,
    y: np.ndarray,
    lr: float = 1e-3,
    batch_size: int = 32,
    epochs: int = 1000,
    seed: int = 0,
    widths: Optional[Sequence[int]] = None,
) -> MLPState:
    """
    Trains the network on mini-batches with ADAM. The target is standardized for training. Weights are drawn from
    default_rng(seed) before the per-epoch shuffles, so a fixed seed reproduces the fit
    :param X: n x p training inputs
    :param y: n training targets
    :param lr: ADAM learning rate
    :param batch_size: Mini-batch size
    :param epochs: Passes over the training set, 0 returns the initial network
    :param seed: The random seed
    :param widths: Layer widths, defaults to [p, 24, 12, 4, 1]
    :return: The trained MLPState
    """
    if lr <= 0:
        raise InvalidHyperparameterError(f"Learning rate must be positive, got {lr}")
    if batch_size < 1:
        raise InvalidHyperparameterError(f"Batch size must be >= 1, got {batch_size}")
    if epochs < 0:
        raise InvalidHyperparameterError(f"Epochs must be >= 0, got {epochs}")

    widths = list(widths) if widths is not None else layer_widths(X.shape[1])
    if widths[0] != X.shape[1] or widths[-1] != 1:
        raise InvalidHyperparameterError(
            f"Widths {widths} do not map {X.shape[1]} inputs to 1 output"
        )

    y = np.asarray(y, dtype=float)
    y_mean: float = float(np.mean(y))
    y_std: float = float(np.std(y)) or 1.0
    z: np.ndarray = (y - y_mean) / y_std

    rng: np.random.Generator = np.random.default_rng(seed)
    params: Params = init_params(widths, rng)
    adam: AdamState = AdamState.zeros_like(params)
    history: List[float] = list()

    n: int = X.shape[0]
    for epoch in range(epochs):
        order: np.ndarray = rng.permutation(n)
        batch_losses: List[float] = list()
        for start in range(0, n, batch_size):
            rows: np.ndarray = order[start : start + batch_size]
            loss, grads = loss_and_gradients(params, X[rows], z[rows])
            if not np.isfinite(loss):
                raise NonFiniteLossError(
                    f"Loss became {loss} at epoch {epoch}, lr={lr}, "
                    f"batch_size={batch_size}"
                )
            params = adam_step(params, grads, adam, lr)
            batch_losses.append(loss * rows.shape[0])

        history.append(float(np.sum(batch_losses) / n))
        if not _all_finite(params):
            raise NonFiniteLossError(
                f"Non-finite weights after epoch {epoch}, lr={lr}, "
                f"batch_size={batch_size}"
            )
        log.debug(f"Epoch {epoch}: loss {history[-1]:.6g}")

    if len(history) > 1 and history[-1] > history[0]:
        log.warning(
            f"MLP training loss rose from {history[0]:.4g} to {history[-1]:.4g} "
            f"over {epochs} epochs"
        )

    return MLPState(
        widths=widths,
        params=params,
        adam=adam,
        lr=float(lr),
        batch_size=int(batch_size),
        epochs=int(epochs),
        y_mean=y_mean,
        y_std=y_std,
        loss_history=history,
    )


def mlp_predict(state: MLPState, X_star: np.ndarray) -> np.ndarray:
    out, _, _ = forward(state.params, np.atleast_2d(X_star))
    return out * state.y_std + state.y_mean


def _params_to_json(params: Params) -> List[Dict[str, list]]:
    return [{"W": W.tolist(), "b": b.tolist()} for W, b in params]


def _params_from_json(layers: List[Dict[str, list]]) -> Params:
    return [
        (np.asarray(layer["W"], dtype=float), np.asarray(layer["b"], dtype=float))
        for layer in layers
    ]


class MLPModel(ForecastModel):
    kind: str = "mlp"

    def __init__(
        self, lr: float = 1e-3, batch_size: int = 32, epochs: int = 1000, seed: int = 0
    ):
        super().__init__()
        self.lr: float = float(lr)
        self.batch_size: int = int(batch_size)
        self.epochs: int = int(epochs)
        self.seed: int = int(seed)
        self.state: Optional[MLPState] = None

    def hyperparameters(self) -> Hyperparameters:
        return {
            "lr": self.lr,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "seed": self.seed,
        }

    def fit(self, matrix: FeatureMatrix) -> "MLPModel":
        log.info(
            f"Fitting MLP model with lr={self.lr}, batch_size={self.batch_size}, "
            f"epochs={self.epochs} on {matrix.n} rows..."
        )
        self.state = mlp_fit(
            matrix.X, matrix.y, self.lr, self.batch_size, self.epochs, self.seed
        )
        self.scaler = matrix.scaler
        return self

    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        self.check_fitted()
        return mlp_predict(self.state, matrix.X)

    def state_dict(self) -> Dict[str, Any]:
        self.check_fitted()
        return {
            "widths": self.state.widths,
            "params": _params_to_json(self.state.params),
            "adam": {
                "m": _params_to_json(self.state.adam.m),
                "v": _params_to_json(self.state.adam.v),
                "step": self.state.adam.step,
            },
            "y_mean": self.state.y_mean,
            "y_std": self.state.y_std,
            "loss_history": self.state.loss_history,
            "scaler": self.scaler.to_dict(),
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.state = MLPState(
            widths=[int(w) for w in state["widths"]],
            params=_params_from_json(state["params"]),
            adam=AdamState(
                m=_params_from_json(state["adam"]["m"]),
                v=_params_from_json(state["adam"]["v"]),
                step=int(state["adam"]["step"]),
            ),
            lr=self.lr,
            batch_size=self.batch_size,
            epochs=self.epochs,
            y_mean=float(state["y_mean"]),
            y_std=float(state["y_std"]),
            loss_history=[float(v) for v in state["loss_history"]],
        )
        self.scaler = Scaler.from_dict(state["scaler"])
