from .driver import (
    ErrorPropParams,
    MonteCarloResult,
    estimate_params,
    monte_carlo_validate,
    negligibility_threshold,
    performance_limit,
    predicted_rmse,
    quadrature_table,
    rmse_curve,
    temperature_mse_share,
    temperature_variance,
    yearly_params,
)
