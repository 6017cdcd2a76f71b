"""
This module provides a command line interface (CLI) for generating data, building
features, backtesting the forecasters and analysing temperature error propagation.
"""

# Standard Library Imports
import argparse
import asyncio
import json
import os
import sys
import textwrap
import traceback
from dataclasses import dataclass, field, fields
from datetime import date
from typing import Any, Dict, List, Optional

# Non-standard Library Imports
import numpy as np
import pandas as pd

# Local Imports
from gas_forecast.common.errors import (
    DataFormatError,
    ForecastError,
    InvalidConfigError,
)
from gas_forecast.common.functions import (
    get_output_dir,
    read_dataset,
    write_dataset,
    write_report_csv,
)
from gas_forecast.common.log import log, logging_levels
from gas_forecast.common.types import Grid, ModelKind, RunConfigJson

# CLI Func Imports
from gas_forecast import print_version
from gas_forecast.backtest import (
    SESSIONS,
    BacktestResult,
    expanding_splits,
    run_backtest,
    write_backtest_reports,
)
from gas_forecast.datagen import GeneratorConfig, generate_frame
from gas_forecast.errorprop import (
    ErrorPropParams,
    estimate_params,
    monte_carlo_validate,
    negligibility_threshold,
    performance_limit,
    predicted_rmse,
    rmse_curve,
    yearly_params,
)
from gas_forecast.features import build_matrix, dump_features
from gas_forecast.metrics import (
    EvaluationReport,
    autocorrelation,
    correlation_summary,
    demand_temperature_table,
    periodogram,
    year_series,
    yearly_overlay,
)
from gas_forecast.metrics import plots
from gas_forecast.models import MODELS

EXIT_OK: int = 0
EXIT_DOMAIN_ERROR: int = 1


@dataclass
class RunConfig:
    """
    Settings of a backtest run, loadable from a JSON object. Command-line flags take
    precedence
    """

    data: Optional[str] = None
    output_dir: Optional[str] = None
    models: List[ModelKind] = field(default_factory=lambda: sorted(MODELS))
    temperature: str = "both"
    test_years: List[int] = field(default_factory=list)
    grids: Dict[str, Grid] = field(default_factory=dict)
    generator_config: Optional[str] = None
    seed: int = 0
    epochs: int = 1000
    n_jobs: int = 1

    def __post_init__(self):
        unknown: List[str] = [m for m in self.models if m not in MODELS]
        if unknown:
            raise InvalidConfigError(
                f"Unknown model(s) in run config: {', '.join(unknown)}"
            )
        if self.temperature not in (*SESSIONS, "both"):
            raise InvalidConfigError(
                f"temperature must be actual, forecast or both, got {self.temperature}"
            )
        bad_grids: List[str] = [kind for kind in self.grids if kind not in MODELS]
        if bad_grids:
            raise InvalidConfigError(
                f"Grids for unknown model(s): {', '.join(bad_grids)}"
            )

    @classmethod
    def from_json(cls, filepath: str) -> "RunConfig":
        log.info(f"Reading run config from {filepath}...")
        try:
            with open(filepath, "r") as f:
                d: RunConfigJson = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidConfigError(
                f"Could not read run config {filepath} as JSON: {e}"
            ) from e

        if not isinstance(d, dict):
            raise InvalidConfigError("Run config must be a JSON object")
        unknown: List[str] = sorted(set(d) - {f.name for f in fields(cls)})
        if unknown:
            raise InvalidConfigError(f"Unknown run config key(s): {', '.join(unknown)}")
        return cls(**d)

    @property
    def sessions(self) -> List[str]:
        return list(SESSIONS) if self.temperature == "both" else [self.temperature]


def _model_list(value: str) -> List[ModelKind]:
    models: List[str] = [m.strip() for m in value.split(",") if m.strip()]
    unknown: List[str] = [m for m in models if m not in MODELS]
    if unknown or not models:
        raise argparse.ArgumentTypeError(
            f"unknown model(s) {unknown}, choose from {sorted(MODELS)}"
        )
    return models


def _year_list(value: str) -> List[int]:
    try:
        return [int(y) for y in value.split(",") if y.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"'{value}' is not a comma-separated list of years"
        ) from None


def _curve_range(value: str) -> np.ndarray:
    try:
        low, high, steps = value.split(":")
        values: np.ndarray = np.linspace(float(low), float(high), int(steps))
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not <min:max:steps>") from None
    if values.size == 0 or values.min() < 0:
        raise argparse.ArgumentTypeError(
            "curve range needs steps >= 1 and non-negative variances"
        )
    return values


def _iso_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not an ISO date") from None


def last_full_year(index: pd.DatetimeIndex) -> int:
    """
    The latest calendar year whose January 1 and December 31 are both in the index, or
    the last year present when no year is complete
    :param index: A daily date index
    :return: The year
    """
    days: pd.DatetimeIndex = index.normalize()
    for year in sorted(set(index.year), reverse=True):
        if pd.Timestamp(year, 1, 1) in days and pd.Timestamp(year, 12, 31) in days:
            return int(year)
    return int(index.year.max())


def _get_version(args: argparse.Namespace) -> None:
    """
    A wrapper function for printing the library version
    :param args: The argparse namespace containing args required by this function
    """
    print_version()


def _generate(args: argparse.Namespace) -> None:
    """
    Writes a synthetic dataset from a generator config
    :param args: The argparse namespace containing args required by this function
    """
    config: GeneratorConfig = GeneratorConfig.from_json(args.config)
    if args.seed is not None:
        config = GeneratorConfig.from_dict({**config.to_dict(), "seed": args.seed})
    write_dataset(generate_frame(config), args.out)


def _features(args: argparse.Namespace) -> None:
    """
    Builds the feature matrix over a date range and dumps it to CSV
    :param args: The argparse namespace containing args required by this function
    """
    dataset: pd.DataFrame = read_dataset(args.data)
    first: date = args.start or dataset.index[0].date()
    last: date = args.end or dataset.index[-1].date()
    matrix = build_matrix(dataset, (first, last), args.temperature)
    dump_features(matrix, args.dump_features)
    print(f"{matrix.n} rows x {matrix.p} features written to {args.dump_features}")


def _resolve_run_config(args: argparse.Namespace) -> RunConfig:
    config: RunConfig = RunConfig.from_json(args.config) if args.config else RunConfig()
    overrides: Dict[str, Any] = {
        "data": args.data,
        "output_dir": args.output_dir,
        "models": args.models,
        "temperature": args.temperature,
        "test_years": args.test_years,
        "seed": args.seed,
        "epochs": args.epochs,
        "n_jobs": args.n_jobs,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    config.__post_init__()

    if not config.data and not config.generator_config:
        raise InvalidConfigError(
            "No dataset given, pass --data or set `data` or `generator_config` "
            "in the run config"
        )
    if not config.test_years:
        raise InvalidConfigError(
            "No test year given, pass --test-years or set `test_years` "
            "in the run config"
        )
    return config


def _backtest_figures(result: BacktestResult, output_dir: str) -> None:
    for session, report in result.reports.items():
        if not report.evaluations:
            continue
        plots.residual_histograms(
            report, os.path.join(output_dir, f"residual_histograms_{session}.svg")
        )
        for year in sorted({e.year for e in report.evaluations}):
            yearly: EvaluationReport = EvaluationReport(
                session=session,
                evaluations=[e for e in report.evaluations if e.year == year],
            )
            plots.residual_lines(
                yearly, os.path.join(output_dir, f"residuals_{session}_{year}.svg")
            )
    if result.comparison is not None and len(result.comparison):
        plots.rmse_comparison_scatter(
            result.comparison, os.path.join(output_dir, "rmse_comparison.svg")
        )


async def _backtest(args: argparse.Namespace) -> None:
    """
    Runs the expanding-window backtest and writes its tables and figures
    :param args: The argparse namespace containing args required by this function
    """
    config: RunConfig = _resolve_run_config(args)
    output_dir: str = get_output_dir(config.output_dir)
    dataset: pd.DataFrame = (
        read_dataset(config.data)
        if config.data
        else generate_frame(GeneratorConfig.from_json(config.generator_config))
    )

    plan = expanding_splits(
        dataset,
        config.test_years,
        models=config.models,
        sessions=config.sessions,
        grids=config.grids,
        fixed={"mlp": {"epochs": config.epochs, "seed": config.seed}},
        n_jobs=config.n_jobs,
    )
    result: BacktestResult = await run_backtest(plan, dataset)

    written: List[str] = write_backtest_reports(
        result, output_dir, timestamp=not args.no_timestamp
    )
    _backtest_figures(result, output_dir)
    for report in result.reports.values():
        if report.evaluations:
            print(report.yearly_table().to_string(index=False))
    if result.comparison is not None:
        print(result.comparison.to_string(index=False))
    log.info(f"Wrote {len(written)} report(s) to {output_dir}")


def _errorprop(args: argparse.Namespace) -> None:
    """
    Estimates the temperature error propagation parameters and prints the performance
    limit
    :param args: The argparse namespace containing args required by this function
    """
    dataset: pd.DataFrame = read_dataset(args.data)
    if "temp_actual" not in dataset.columns:
        raise DataFormatError(f"{args.data} has no temp_actual column")

    sigma2_0: float = args.sigma0 if args.sigma0 is not None else 0.0
    params: ErrorPropParams = estimate_params(dataset, sigma2_0)

    rows: List[Dict[str, Any]] = [
        {"quantity": "alpha", "value": params.alpha},
        {"quantity": "p_cold", "value": params.p_cold},
        {"quantity": "sigma2_eps", "value": params.sigma2_eps},
        {"quantity": "performance_limit", "value": performance_limit(params)},
    ]
    if args.sigma0 is not None:
        rows += [
            {"quantity": "sigma2_0", "value": sigma2_0},
            {"quantity": "predicted_rmse", "value": predicted_rmse(sigma2_0, params)},
            {
                "quantity": "negligibility_threshold",
                "value": negligibility_threshold(sigma2_0, params),
            },
        ]
    summary: pd.DataFrame = pd.DataFrame(rows)
    print(summary.to_string(index=False))

    output_dir: str = get_output_dir(args.output_dir)
    timestamp: bool = not args.no_timestamp
    write_report_csv(
        summary, os.path.join(output_dir, "errorprop.csv"), timestamp=timestamp
    )
    yearly: pd.DataFrame = yearly_params(dataset, sigma2_0)
    write_report_csv(
        yearly, os.path.join(output_dir, "errorprop_yearly.csv"), timestamp=timestamp
    )

    if args.curve is not None:
        curve: pd.DataFrame = rmse_curve(sigma2_0, params, args.curve)
        write_report_csv(
            curve, os.path.join(output_dir, "rmse_curve.csv"), timestamp=timestamp
        )
        plots.rmse_curve_figure(curve, os.path.join(output_dir, "rmse_curve.svg"))

    if args.validate is not None:
        result = monte_carlo_validate(
            GeneratorConfig.from_json(args.validate), args.days, args.seed
        )
        print(
            f"Monte Carlo: empirical RMSE {result.empirical_rmse:.4f}, "
            f"predicted {result.predicted_rmse:.4f}, "
            f"gap {100 * result.relative_gap:.2f}%"
        )


def _diagnostics(args: argparse.Namespace) -> None:
    """
    Writes the autocorrelation, periodogram, correlation summary and exploratory figures
    of a dataset, each figure next to a CSV with its data
    :param args: The argparse namespace containing args required by this function
    """
    dataset: pd.DataFrame = read_dataset(args.data)
    output_dir: str = get_output_dir(args.output_dir)
    timestamp: bool = not args.no_timestamp

    def output(name: str) -> str:
        return os.path.join(output_dir, name)

    acf: pd.Series = autocorrelation(dataset["rgd"].to_numpy(), args.max_lag)
    spectrum: pd.DataFrame = periodogram(dataset["rgd"].to_numpy())
    summary: pd.DataFrame = correlation_summary(dataset)
    scatter: pd.DataFrame = demand_temperature_table(dataset)
    overlay: pd.DataFrame = yearly_overlay(dataset["rgd"])
    year: int = args.year if args.year is not None else last_full_year(dataset.index)
    series: pd.DataFrame = year_series(dataset, year)

    write_report_csv(acf.reset_index(), output("acf.csv"), timestamp=timestamp)
    write_report_csv(spectrum, output("periodogram.csv"), timestamp=timestamp)
    write_report_csv(summary, output("correlations.csv"), timestamp=timestamp)
    write_report_csv(
        scatter[["date", "temperature", "rgd"]],
        output("scatter_rgd_temperature.csv"),
        timestamp=timestamp,
    )
    write_report_csv(
        scatter[["date", "hdd", "rgd"]],
        output("scatter_rgd_hdd.csv"),
        timestamp=timestamp,
    )
    write_report_csv(overlay, output("yearly_overlay.csv"), timestamp=timestamp)
    write_report_csv(series, output(f"series_{year}.csv"), timestamp=timestamp)

    plots.acf_figure(acf, output("acf.svg"))
    plots.periodogram_figure(spectrum, output("periodogram.svg"))
    plots.scatter_rgd_temperature(scatter, output("scatter_rgd_temperature.svg"))
    plots.scatter_rgd_hdd(scatter, output("scatter_rgd_hdd.svg"))
    plots.yearly_overlay_figure(overlay, output("yearly_overlay.svg"))
    plots.series_plot(series, output(f"series_{year}.svg"), year)
    print(summary.to_string(index=False))


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point into the CLI.
    :param argv: Arguments, defaulting to sys.argv
    :return: The exit code: 0 on success, 1 on a data or domain error. Usage errors exit
        with 2 from argparse
    """

    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        "gas-forecast",
        description="Command line interface for one-day-ahead gas demand forecasting "
        "using the gas_forecast library",
    )

    parser.add_argument(
        "--verbose", "-v", help="Enable verbose logging", action="count", default=0
    )

    sub_parser = parser.add_subparsers()
    sub_parser.required = True
    sub_parser.dest = "command"

    # Version
    version_parser = sub_parser.add_parser("version")
    version_parser.set_defaults(func=_get_version)

    # Generate
    generate_parser = sub_parser.add_parser(
        "generate",
        formatter_class=argparse.RawTextHelpFormatter,
        help="Write a synthetic dataset",
    )
    generate_parser.add_argument(
        "--config",
        metavar="<path_to_json>",
        required=True,
        help=textwrap.dedent(
            """
        A JSON file holding one object with the generator settings. Every key is
        optional. Plain-text key=value files are not accepted.

        Example:
        {
          "start": "2007-01-01",
          "end": "2017-12-31",
          "alpha": 10.5,
          "sigma_eps": 0.251,
          "sigma0": 3.65,
          "summer_noise": 0.02,
          "seed": 0
        }
        """
        ),
    )
    generate_parser.add_argument(
        "--out", metavar="<csv>", required=True, help="Destination CSV"
    )
    generate_parser.add_argument(
        "--seed", type=int, help="Overrides the seed of the config"
    )
    generate_parser.set_defaults(func=_generate)

    # Features
    features_parser = sub_parser.add_parser(
        "features", help="Dump the feature matrix of a dataset"
    )
    features_parser.add_argument(
        "--data", metavar="<csv>", required=True, help="Dataset CSV"
    )
    features_parser.add_argument(
        "--dump-features", metavar="<csv>", required=True, help="Destination CSV"
    )
    features_parser.add_argument(
        "--temperature",
        choices=SESSIONS,
        default="forecast",
        help="Temperature column",
    )
    features_parser.add_argument(
        "--start", type=_iso_date, help="First day, defaults to the dataset start"
    )
    features_parser.add_argument(
        "--end", type=_iso_date, help="Last day, defaults to the dataset end"
    )
    features_parser.set_defaults(func=_features)

    # Backtest
    backtest_parser = sub_parser.add_parser(
        "backtest",
        formatter_class=argparse.RawTextHelpFormatter,
        help="Run the expanding-window backtest",
    )
    backtest_parser.add_argument("--data", metavar="<csv>", help="Dataset CSV")
    backtest_parser.add_argument(
        "--models",
        type=_model_list,
        metavar="ridge,gp,knn,mlp,torus",
        help="Comma-separated model kinds",
    )
    backtest_parser.add_argument(
        "--test-years", type=_year_list, metavar="2015,2016,2017", help="Test years"
    )
    backtest_parser.add_argument(
        "--temperature",
        choices=(*SESSIONS, "both"),
        help="Temperature session(s) to run, default both",
    )
    backtest_parser.add_argument(
        "--config",
        metavar="<path_to_json>",
        help=textwrap.dedent(
            """
        A JSON file holding one object with the run settings. Flags take precedence.
        Plain-text key=value files are not accepted.

        Example:
        {
          "data": "rgd.csv",
          "models": ["ridge", "torus"],
          "test_years": [2015, 2016, 2017],
          "grids": {"ridge": {"lam": [0.0001, 0.01, 1.0]}},
          "epochs": 200
        }
        """
        ),
    )
    backtest_parser.add_argument(
        "--output-dir", help="Defaults to $GAS_FORECAST_OUTPUT_DIR or ./output"
    )
    backtest_parser.add_argument("--seed", type=int, help="MLP seed")
    backtest_parser.add_argument("--epochs", type=int, help="MLP epochs")
    backtest_parser.add_argument(
        "--n-jobs", type=int, help="Concurrent tuning workers"
    )
    backtest_parser.add_argument(
        "--no-timestamp", action="store_true", help="Omit the `# generated` line"
    )
    backtest_parser.set_defaults(func=_backtest)

    # Error propagation
    errorprop_parser = sub_parser.add_parser(
        "errorprop", help="Temperature error propagation analysis"
    )
    errorprop_parser.add_argument(
        "--data",
        metavar="<csv>",
        required=True,
        help="Dataset CSV with both temperatures",
    )
    errorprop_parser.add_argument(
        "--sigma0",
        type=float,
        metavar="<MSCM^2>",
        help="True-temperature forecast MSE of the forecaster",
    )
    errorprop_parser.add_argument(
        "--curve",
        type=_curve_range,
        metavar="<min:max:steps>",
        help="Sample the RMSE curve over sigma2_eps",
    )
    errorprop_parser.add_argument(
        "--validate",
        metavar="<path_to_json>",
        help="Monte Carlo check on a JSON generator config",
    )
    errorprop_parser.add_argument(
        "--days", type=int, default=100_000, help="Monte Carlo days"
    )
    errorprop_parser.add_argument(
        "--seed", type=int, default=0, help="Monte Carlo seed"
    )
    errorprop_parser.add_argument(
        "--output-dir", help="Defaults to $GAS_FORECAST_OUTPUT_DIR or ./output"
    )
    errorprop_parser.add_argument(
        "--no-timestamp", action="store_true", help="Omit the `# generated` line"
    )
    errorprop_parser.set_defaults(func=_errorprop)

    # Diagnostics
    diagnostics_parser = sub_parser.add_parser(
        "diagnostics",
        help="Autocorrelation, periodogram, correlations and exploratory figures",
    )
    diagnostics_parser.add_argument(
        "--data", metavar="<csv>", required=True, help="Dataset CSV"
    )
    diagnostics_parser.add_argument(
        "--max-lag", type=int, default=400, help="Largest autocorrelation lag"
    )
    diagnostics_parser.add_argument(
        "--year",
        type=int,
        help="Year of the demand and HDD series figure, defaults to the last full year",
    )
    diagnostics_parser.add_argument(
        "--output-dir", help="Defaults to $GAS_FORECAST_OUTPUT_DIR or ./output"
    )
    diagnostics_parser.add_argument(
        "--no-timestamp", action="store_true", help="Omit the `# generated` line"
    )
    diagnostics_parser.set_defaults(func=_diagnostics)

    # Parse the args
    args: argparse.Namespace = parser.parse_args(argv)

    # Setup logging
    log_levels: Dict[int, str] = {0: "WARN", 1: "INFO", 2: "DEBUG"}
    user_log_level: str = (
        log_levels[min(args.verbose, 2)] if hasattr(args, "verbose") else log_levels[0]
    )

    log_level: int = logging_levels[user_log_level]
    log.setLevel(log_level)

    log.info("Running with args=%s and log_level=%s", str(args), log_level)

    # Try calling the appropriate handler
    try:
        outcome = args.func(args)
        if asyncio.iscoroutine(outcome):
            asyncio.run(outcome)
    except ForecastError as e:
        log.debug(traceback.format_exc())
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    except Exception:
        log.error(traceback.format_exc())
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
