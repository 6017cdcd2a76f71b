from .base import ForecastModel
from .driver import MODELS, make_model
from .gp import (
    GPState,
    GaussianProcessModel,
    gp_fit,
    gp_log_marginal_likelihood,
    gp_predict,
    gram,
    matern_kernel,
    pairwise_distances,
)
from .knn import KNNModel, KNNState, knn_fit, knn_predict
from .mlp import (
    AdamState,
    MLPModel,
    MLPState,
    init_params,
    forward,
    layer_widths,
    loss_and_gradients,
    mlp_fit,
    mlp_predict,
)
from .persistence import load_model, model_from_dict, model_to_dict, save_model
from .ridge import (
    RidgeModel,
    RidgeState,
    ridge_df,
    ridge_fit,
    ridge_predict,
    ridge_solve,
)
from .torus import (
    TorusModel,
    TorusState,
    torus_aic,
    torus_basis,
    torus_design,
    torus_fit,
    torus_long_term,
    torus_predict,
    torus_regressors,
)
