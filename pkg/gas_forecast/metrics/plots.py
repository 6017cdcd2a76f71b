"""
SVG figures for the reports. Each figure is written from the same frame that goes to its
CSV twin, with a fixed hash salt and no date metadata so reruns produce identical files
"""

# Standard Library Imports
from typing import Callable, List

# Non-Standard Imports
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

# Local Imports
from gas_forecast.common.functions import ensure_parent_dir
from gas_forecast.common.log import log
from gas_forecast.metrics.driver import EvaluationReport

matplotlib.rcParams["svg.hashsalt"] = "gas_forecast"
matplotlib.rcParams["svg.fonttype"] = "none"

FIGURE_SIZE = (10, 5)


def _save(fig: plt.Figure, filepath: str) -> None:
    ensure_parent_dir(filepath)
    log.info(f"Writing figure to {filepath}...")
    fig.tight_layout()
    fig.savefig(filepath, format="svg", metadata={"Date": None})
    plt.close(fig)


def _figure(
    draw: Callable[[plt.Axes], None],
    filepath: str,
    title: str,
    xlabel: str,
    ylabel: str,
) -> None:
    fig, ax = plt.subplots(figsize=FIGURE_SIZE)
    draw(ax)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    _save(fig, filepath)


def residual_lines(report: EvaluationReport, filepath: str) -> None:
    """Daily residuals of every model over the pooled test days"""

    def draw(ax: plt.Axes) -> None:
        for model in report.models:
            residuals: pd.Series = report.residuals(model)
            ax.plot(residuals.index, residuals.to_numpy(), linewidth=0.7, label=model)
        ax.axhline(0.0, color="black", linewidth=0.5)
        ax.legend()

    _figure(
        draw,
        filepath,
        f"Forecast residuals ({report.session} temperature)",
        "date",
        "residual (MSCM)",
    )


def residual_histograms(
    report: EvaluationReport, filepath: str, bins: int = 50
) -> None:
    """Residual distribution of every model on shared bins"""
    pooled: np.ndarray = np.concatenate(
        [report.residuals(m).to_numpy() for m in report.models]
    )
    edges: np.ndarray = np.histogram_bin_edges(pooled, bins=bins)

    def draw(ax: plt.Axes) -> None:
        for model in report.models:
            residuals: np.ndarray = report.residuals(model).to_numpy()
            ax.hist(residuals, bins=edges, histtype="step", label=model)
        ax.legend()

    _figure(
        draw,
        filepath,
        f"Residual distribution ({report.session} temperature)",
        "residual (MSCM)",
        "days",
    )


def rmse_comparison_scatter(comparison: pd.DataFrame, filepath: str) -> None:
    """
    Measured forecast-temperature RMSE against the RMSE predicted from the
    true-temperature session
    """
    columns: List[str] = ["predicted_rmse", "rmse_forecast"]

    def draw(ax: plt.Axes) -> None:
        for model, group in comparison.groupby("model", sort=False):
            ax.scatter(group["predicted_rmse"], group["rmse_forecast"], label=model)
        low: float = float(comparison[columns].min().min())
        high: float = float(comparison[columns].max().max())
        ax.plot([low, high], [low, high], color="black", linewidth=0.5)
        ax.legend()

    _figure(
        draw,
        filepath,
        "Predicted against measured RMSE",
        "predicted RMSE (MSCM)",
        "measured RMSE (MSCM)",
    )


def rmse_curve_figure(curve: pd.DataFrame, filepath: str) -> None:
    def draw(ax: plt.Axes) -> None:
        ax.plot(curve["temperature_rmse"], curve["predicted_rmse"])

    _figure(
        draw,
        filepath,
        "Gas forecast RMSE against temperature forecast RMSE",
        "temperature RMSE (C)",
        "gas RMSE (MSCM)",
    )


def acf_figure(acf: pd.Series, filepath: str) -> None:
    def draw(ax: plt.Axes) -> None:
        ax.stem(acf.index.to_numpy(), acf.to_numpy())

    _figure(draw, filepath, "Demand autocorrelation", "lag (days)", "acf")


def periodogram_figure(spectrum: pd.DataFrame, filepath: str) -> None:
    def draw(ax: plt.Axes) -> None:
        ax.semilogx(spectrum["period"], spectrum["power"])

    _figure(draw, filepath, "Demand periodogram", "period (days)", "power")


def scatter_rgd_temperature(table: pd.DataFrame, filepath: str) -> None:
    """Daily demand against temperature"""

    def draw(ax: plt.Axes) -> None:
        ax.scatter(table["temperature"], table["rgd"], s=4, alpha=0.5)

    _figure(
        draw, filepath, "Demand against temperature", "temperature (C)", "RGD (MSCM)"
    )


def scatter_rgd_hdd(table: pd.DataFrame, filepath: str) -> None:
    """Daily demand against heating degree days"""

    def draw(ax: plt.Axes) -> None:
        ax.scatter(table["hdd"], table["rgd"], s=4, alpha=0.5)

    _figure(draw, filepath, "Demand against HDD", "HDD (C)", "RGD (MSCM)")


def yearly_overlay_figure(overlay: pd.DataFrame, filepath: str) -> None:
    """One demand line per year, shifted so the weekdays line up"""

    def draw(ax: plt.Axes) -> None:
        for year, group in overlay.groupby("year"):
            ax.plot(group["aligned_day"], group["rgd"], linewidth=0.6, label=str(year))
        ax.legend(ncol=2, fontsize="small")

    _figure(
        draw,
        filepath,
        "Demand by year, weekdays aligned",
        "day of year (aligned)",
        "RGD (MSCM)",
    )


def series_plot(table: pd.DataFrame, filepath: str, year: int) -> None:
    """Demand and HDD of one year on twin axes"""
    dates: pd.DatetimeIndex = pd.DatetimeIndex(pd.to_datetime(table["date"]))

    def draw(ax: plt.Axes) -> None:
        ax.plot(dates, table["rgd"], color="tab:blue", linewidth=0.8, label="RGD")
        hdd_axis: plt.Axes = ax.twinx()
        hdd_axis.plot(dates, table["hdd"], color="tab:red", linewidth=0.8, label="HDD")
        hdd_axis.set_ylabel("HDD (C)")
        ax.legend(loc="upper left")
        hdd_axis.legend(loc="upper right")

    _figure(draw, filepath, f"Demand and HDD in {year}", "date", "RGD (MSCM)")
