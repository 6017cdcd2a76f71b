"""
This file generates seeded synthetic demand datasets with known ground truth: a seasonal
AR(1) temperature, a noisy temperature forecast, and demand linear in HDD on top of a
weekly base profile. The demand noise shrinks with the heating season, so summer demand
repeats its weekly pattern almost exactly

Example Usage:
```
config = GeneratorConfig.from_json("generator.json")
df = generate_frame(config)
write_dataset(df, "rgd.csv")
```
"""

# Standard Library Imports
import json
from dataclasses import asdict, dataclass, field, fields
from datetime import date
from typing import Any, Dict, List, Tuple

# Non-Standard Imports
import numpy as np
import pandas as pd
from scipy import signal

# Local Imports
from gas_forecast.calendar import HolidayCalendar, ITALIAN_CALENDAR, is_holiday
from gas_forecast.common.errors import InvalidConfigError
from gas_forecast.common.functions import ensure_parent_dir
from gas_forecast.common.log import log
from gas_forecast.common.types import GeneratorConfigJson
from gas_forecast.features import DailyRecord, hdd, records_to_frame

DAYS_PER_YEAR: float = 365.25

# Monday first
DEFAULT_WEEKLY_PROFILE: Tuple[float, ...] = (
    24.0,
    24.0,
    24.0,
    24.0,
    23.0,
    20.0,
    18.0,
)


@dataclass(frozen=True)
class GeneratorConfig:
    """
    Ground truth of a synthetic dataset. Temperatures are in Celsius, demand in MSCM.
    The default amplitude is negative so the cosine puts the cold season around Jan 1.
    `summer_noise` is the share of sigma0^2 left on days the seasonal temperature needs
    no heating
    """

    start: str = "2007-01-01"
    end: str = "2017-12-31"
    alpha: float = 10.5
    weekly_profile: Tuple[float, ...] = field(default=DEFAULT_WEEKLY_PROFILE)
    holiday_factor: float = 0.8
    temp_mean: float = 14.5
    temp_amplitude: float = -9.5
    ar_coef: float = 0.7
    ar_std: float = 1.5
    sigma_eps: float = 0.251
    sigma0: float = 3.65
    floor: float = 0.1
    summer_noise: float = 0.02
    seed: int = 0

    def __post_init__(self):
        profile: Tuple[float, ...] = tuple(float(v) for v in self.weekly_profile)
        object.__setattr__(self, "weekly_profile", profile)
        problems: List[str] = list()

        try:
            if self.start_date > self.end_date:
                problems.append(f"start {self.start} is after end {self.end}")
        except ValueError as e:
            problems.append(f"malformed date: {e}")

        if len(self.weekly_profile) != 7:
            problems.append(
                f"weekly_profile needs 7 values, got {len(self.weekly_profile)}"
            )
        elif min(self.weekly_profile) <= 0:
            problems.append("weekly_profile values must be positive")
        if not abs(self.ar_coef) < 1:
            problems.append(f"|ar_coef| must be < 1, got {self.ar_coef}")
        for name in ("ar_std", "sigma_eps", "sigma0", "alpha"):
            if getattr(self, name) < 0:
                problems.append(
                    f"{name} must be non-negative, got {getattr(self, name)}"
                )
        if self.holiday_factor <= 0:
            problems.append(
                f"holiday_factor must be positive, got {self.holiday_factor}"
            )
        if self.floor <= 0:
            problems.append(f"floor must be positive, got {self.floor}")
        if not 0.0 <= self.summer_noise <= 1.0:
            problems.append(
                f"summer_noise must lie in [0, 1], got {self.summer_noise}"
            )

        if problems:
            raise InvalidConfigError(
                f"Invalid generator config: {'; '.join(problems)}"
            )

    @property
    def start_date(self) -> date:
        return date.fromisoformat(self.start)

    @property
    def end_date(self) -> date:
        return date.fromisoformat(self.end)

    @property
    def sigma2_eps(self) -> float:
        return self.sigma_eps**2

    @property
    def sigma2_0(self) -> float:
        return self.sigma0**2

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "GeneratorConfig":
        """
        Builds a config from a JSON object; missing keys keep their defaults
        :param d: The parsed JSON object
        :return: The validated GeneratorConfig
        """
        if not isinstance(d, dict):
            raise InvalidConfigError("Generator config must be a JSON object")
        known: set[str] = {f.name for f in fields(cls)}
        unknown: List[str] = sorted(set(d) - known)
        if unknown:
            raise InvalidConfigError(
                f"Unknown generator config key(s): {', '.join(unknown)}"
            )
        try:
            return cls(**d)
        except InvalidConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise InvalidConfigError(f"Invalid generator config: {e}") from e

    @classmethod
    def from_json(cls, filepath: str) -> "GeneratorConfig":
        log.info(f"Reading generator config from {filepath}...")
        try:
            with open(filepath, "r") as f:
                d: GeneratorConfigJson = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidConfigError(
                f"Could not read generator config {filepath} as JSON: {e}"
            ) from e
        return cls.from_dict(dict(d))

    def to_dict(self) -> GeneratorConfigJson:
        d: Dict[str, Any] = asdict(self)
        d["weekly_profile"] = list(self.weekly_profile)
        return d

    def to_json(self, filepath: str) -> None:
        ensure_parent_dir(filepath)
        with open(filepath, "w") as f:
            json.dump(self.to_dict(), f, indent=4)


def seasonal_temperature(config: GeneratorConfig, yeardays: np.ndarray) -> np.ndarray:
    """Deterministic seasonal temperature of each day of year"""
    phase: np.ndarray = 2.0 * np.pi * np.asarray(yeardays, dtype=float) / DAYS_PER_YEAR
    return config.temp_mean + config.temp_amplitude * np.cos(phase)


def noise_weights(config: GeneratorConfig, yeardays: np.ndarray) -> np.ndarray:
    """
    Share of sigma0^2 carried by the demand noise of each day of year. The weight
    follows the HDD of the seasonal temperature, floored at `summer_noise` on days
    without heating, and averages 1 over a year so sigma0^2 stays the year-round noise
    variance. A climate with no seasonal heating gets weight 1 everywhere
    :param config: The generator config
    :param yeardays: Day-of-year of each day
    :return: One non-negative weight per day
    """
    yeardays = np.asarray(yeardays, dtype=float)
    year: np.ndarray = np.arange(1.0, 366.0)
    mean_hdd: float = float(np.mean(hdd(seasonal_temperature(config, year))))
    if mean_hdd == 0.0:
        return np.ones_like(yeardays)

    heating: np.ndarray = hdd(seasonal_temperature(config, yeardays)) / mean_hdd
    return config.summer_noise + (1.0 - config.summer_noise) * heating


def simulate_temperature(
    config: GeneratorConfig, yeardays: np.ndarray, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draws actual and forecast temperatures for consecutive days. The AR(1) anomaly
    starts from its stationary law
    :param config: The generator config
    :param yeardays: Day-of-year of each simulated day
    :param rng: The random generator; anomaly innovations come before forecast errors
    :return: (actual T, forecast T + eps)
    """
    n: int = yeardays.shape[0]
    innovations: np.ndarray = rng.normal(0.0, config.ar_std, size=n)
    if n:
        innovations[0] /= np.sqrt(1.0 - config.ar_coef**2)
    anomaly: np.ndarray = signal.lfilter([1.0], [1.0, -config.ar_coef], innovations)

    actual: np.ndarray = seasonal_temperature(config, yeardays) + anomaly
    forecast: np.ndarray = actual + rng.normal(0.0, config.sigma_eps, size=n)
    return actual, forecast


def demand_noise(
    config: GeneratorConfig, yeardays: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """
    Draws the temperature-free demand noise, variance sigma0^2 times the day's weight
    :param config: The generator config
    :param yeardays: Day-of-year of each simulated day
    :param rng: The random generator
    :return: One noise value per day in MSCM
    """
    scale: np.ndarray = config.sigma0 * np.sqrt(noise_weights(config, yeardays))
    return rng.normal(0.0, 1.0, size=yeardays.shape[0]) * scale


def generate(
    config: GeneratorConfig, cal: HolidayCalendar = ITALIAN_CALENDAR
) -> List[DailyRecord]:
    """
    Generates one record per day of the config's date range. The same config always
    gives the same records
    :param config: The generator config
    :param cal: The holiday calendar
    :return: The daily records with both temperature columns
    """
    dates: pd.DatetimeIndex = pd.date_range(
        config.start_date, config.end_date, freq="D"
    )
    log.info(
        f"Generating {len(dates)} synthetic days ({config.start} to {config.end}) "
        f"with seed {config.seed}..."
    )

    rng: np.random.Generator = np.random.default_rng(config.seed)
    yeardays: np.ndarray = dates.dayofyear.to_numpy(dtype=float)
    actual, forecast = simulate_temperature(config, yeardays, rng)

    base: np.ndarray = np.asarray(config.weekly_profile)[dates.weekday.to_numpy()]
    holidays: np.ndarray = np.array([is_holiday(ts.date(), cal) for ts in dates])
    base = np.where(holidays, base * config.holiday_factor, base)

    rgd: np.ndarray = (
        base + config.alpha * hdd(actual) + demand_noise(config, yeardays, rng)
    )
    rgd = np.maximum(rgd, config.floor)

    return [
        DailyRecord(
            date=ts.date(), rgd=float(g), temp_forecast=float(f), temp_actual=float(a)
        )
        for ts, g, f, a in zip(dates, rgd, forecast, actual)
    ]


def generate_frame(
    config: GeneratorConfig, cal: HolidayCalendar = ITALIAN_CALENDAR
) -> pd.DataFrame:
    """Same as generate, as a validated dataset frame"""
    return records_to_frame(generate(config, cal))
