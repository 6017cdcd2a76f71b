"""
Handy functions used across the module
"""

# Standard library imports
from typing import Callable, List, Optional
import functools
import os
from datetime import datetime

# Non-Standard Imports
import numpy as np
import pandas as pd

# Local Imports
from gas_forecast.common.log import log
from gas_forecast.common.errors import DataFormatError, ForecastError

# Canonical dataset schema
DATE_COLUMN: str = "date"
REQUIRED_COLUMNS: List[str] = ["rgd", "temp_forecast"]
OPTIONAL_COLUMNS: List[str] = ["temp_actual"]
DATASET_COLUMNS: List[str] = REQUIRED_COLUMNS + OPTIONAL_COLUMNS

# Output directory
OUTPUT_DIR_ENV: str = "GAS_FORECAST_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR: str = "output"


def validate_dataset(df: pd.DataFrame) -> pd.DataFrame:
    """
    Checks a dataset frame against the canonical schema and returns a clean, date-indexed copy
    :param df: A frame indexed by date (DatetimeIndex) with the columns rgd, temp_forecast and optionally temp_actual
    :return: The validated frame, columns in canonical order
    """
    missing: List[str] = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise DataFormatError(
            f"Dataset is missing required column(s): {', '.join(missing)}"
        )

    if not isinstance(df.index, pd.DatetimeIndex):
        raise DataFormatError("Dataset must be indexed by date")

    if df.index.has_duplicates:
        duplicated: pd.DatetimeIndex = df.index[df.index.duplicated()]
        raise DataFormatError(
            f"Duplicate date(s) in dataset, first: {duplicated[0].date()}"
        )

    if not df.index.is_monotonic_increasing:
        raise DataFormatError("Dataset dates must be in increasing order")

    columns: List[str] = [c for c in DATASET_COLUMNS if c in df.columns]
    out: pd.DataFrame = df[columns].astype(float)

    values: np.ndarray = out.to_numpy()
    if not np.isfinite(values).all():
        row, col = np.argwhere(~np.isfinite(values))[0]
        raise DataFormatError(
            f"Non-finite value in column {columns[col]} on {out.index[row].date()}"
        )

    if (out["rgd"] < 0).any():
        bad: pd.Timestamp = out.index[(out["rgd"] < 0).to_numpy()][0]
        raise DataFormatError(f"Negative demand on {bad.date()}")

    out.index.name = DATE_COLUMN
    return out


def read_dataset(filepath: str) -> pd.DataFrame:
    """
    Reads a dataset CSV with schema `date,rgd,temp_forecast[,temp_actual]`. Malformed rows are errors, not skips
    :param filepath: The path to the CSV file
    :return: A validated, date-indexed pandas dataframe
    """
    log.info(f"Reading dataset from {filepath}...")
    try:
        raw: pd.DataFrame = pd.read_csv(
            filepath, dtype=str, comment="#", keep_default_na=False
        )
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFormatError(f"Could not read {filepath}: {e}") from e

    if DATE_COLUMN not in raw.columns:
        raise DataFormatError(f"{filepath} has no '{DATE_COLUMN}' column")

    unknown: List[str] = [
        c for c in raw.columns if c not in DATASET_COLUMNS and c != DATE_COLUMN
    ]
    if unknown:
        raise DataFormatError(f"Unknown column(s) in {filepath}: {', '.join(unknown)}")

    # Strict ISO-8601 calendar dates
    try:
        index: pd.DatetimeIndex = pd.DatetimeIndex(
            pd.to_datetime(raw[DATE_COLUMN], format="%Y-%m-%d", errors="raise")
        )
    except (ValueError, TypeError) as e:
        raise DataFormatError(f"Malformed date in {filepath}: {e}") from e

    data: pd.DataFrame = raw.drop(columns=[DATE_COLUMN])
    for column in data.columns:
        try:
            data[column] = pd.to_numeric(data[column], errors="raise")
        except (ValueError, TypeError) as e:
            raise DataFormatError(f"Malformed value in column {column}: {e}") from e

    data.index = index
    df: pd.DataFrame = validate_dataset(data)
    log.info(
        f"Read {len(df)} daily records "
        f"({df.index[0].date()} to {df.index[-1].date()})."
    )
    return df


def write_dataset(df: pd.DataFrame, filepath: str) -> None:
    """
    Writes a dataset frame to CSV using the canonical column order and round-trip float precision
    :param df: A date-indexed dataset frame
    :param filepath: Destination CSV path
    """
    df = validate_dataset(df)
    out: pd.DataFrame = df.copy()
    out.index = out.index.strftime("%Y-%m-%d")
    out.index.name = DATE_COLUMN

    ensure_parent_dir(filepath)
    log.info(f"Writing {len(out)} records to {filepath}...")
    out.to_csv(filepath, float_format="%.17g", lineterminator="\n")


def write_report_csv(
    df: pd.DataFrame, filepath: str, timestamp: bool = True, index: bool = False
) -> None:
    """
    Writes a report table to CSV, optionally preceded by a single `# generated ...` header line
    :param df: The table to write
    :param filepath: Destination CSV path
    :param timestamp: Set to False for byte-identical reruns
    :param index: Whether to write the frame index
    """
    ensure_parent_dir(filepath)
    log.info(f"Writing report to {filepath}...")
    with open(filepath, "w", newline="") as f:
        if timestamp:
            f.write(f"# generated {datetime.now().isoformat(timespec='seconds')}\n")
        df.to_csv(f, index=index, float_format="%.17g", lineterminator="\n")


def ensure_parent_dir(filepath: str) -> None:
    """
    Creates the parent directory of a file path if it doesn't exist
    :param filepath: The path of a file about to be written
    """
    parent: str = os.path.dirname(os.path.abspath(filepath))
    os.makedirs(parent, exist_ok=True)


def get_output_dir(override: Optional[str] = None) -> str:
    """
    Resolves the output directory from an explicit value, the environment, or the default
    :param override: An explicit directory, e.g. from the command line
    :return: The output directory path
    """
    if override:
        return override
    return os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)


def annotate_errors(context: str):
    """
    Decorator function for prefixing a context label to domain errors raised by the wrapped function
    :param context: A short label, e.g. "split 2016, model gp"; may contain {placeholders} filled from kwargs
    """

    def wrapper(func: Callable):
        @functools.wraps(func)
        def _annotate_errors(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except ForecastError as e:
                label: str = context.format(**kwargs)
                log.warning(f"[{label}] {type(e).__name__}: {e}")
                e.args = (f"[{label}] {e.args[0] if e.args else ''}",) + e.args[1:]
                raise

        return _annotate_errors

    return wrapper
