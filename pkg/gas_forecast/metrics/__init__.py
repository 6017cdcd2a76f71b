from .driver import (
    COLD_MONTHS,
    EvaluationReport,
    ModelEvaluation,
    cold_months_mape,
    gaussian_reference,
    mae,
    mae_rmse_ratio,
    mape,
    monthly_breakdown,
    rmse,
)
from .diagnostics import (
    autocorrelation,
    correlation_summary,
    demand_temperature_table,
    lag1_correlation_excluding_weekend_transitions,
    lag_correlation,
    pearson,
    periodogram,
    similar_day_difference_correlation,
    weekday_shift,
    year_series,
    yearly_overlay,
)
