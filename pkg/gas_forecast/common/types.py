"""
Custom classes used in the module
"""

from typing import Dict, List, Literal, TypedDict, Union

TemperatureSource = Literal["actual", "forecast"]
ModelKind = Literal["ridge", "gp", "knn", "mlp", "torus"]

HyperValue = Union[int, float, str]
Hyperparameters = Dict[str, HyperValue]
Grid = Dict[str, List[HyperValue]]


class GeneratorConfigJson(TypedDict, total=False):
    start: str
    end: str
    alpha: float
    weekly_profile: List[float]
    holiday_factor: float
    temp_mean: float
    temp_amplitude: float
    ar_coef: float
    ar_std: float
    sigma_eps: float
    sigma0: float
    floor: float
    summer_noise: float
    seed: int


class RunConfigJson(TypedDict, total=False):
    data: str
    output_dir: str
    models: List[ModelKind]
    temperature: str
    test_years: List[int]
    grids: Dict[str, Grid]
    generator_config: str
    seed: int
    epochs: int
    n_jobs: int
