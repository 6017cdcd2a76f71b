from .driver import (
    SESSIONS,
    BacktestPlan,
    BacktestResult,
    Split,
    audit_no_lookahead,
    evaluate_model,
    expanding_splits,
    residual_table,
    run_backtest,
    session_comparison,
    tune_model,
    write_backtest_reports,
)
