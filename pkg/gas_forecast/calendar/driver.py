"""
This file provides civil-date arithmetic, the Italian holiday calendar and the similar-day mapping

Example Usage:
```
from datetime import date
sim = similar_day(date(2017, 7, 12))
print(sim)  # 2016-07-13
```
"""

# Standard Library Imports
from dataclasses import dataclass, field
from datetime import date, timedelta
from functools import lru_cache
from typing import List, Tuple

# Local Imports
from gas_forecast.common.errors import CalendarRangeError

# Supported range of the Easter computus
MIN_YEAR: int = 1900
MAX_YEAR: int = 2200

# 1 Jan, 6 Jan, 25 Apr, 1 May, 2 Jun, 15 Aug, 1 Nov, 8 Dec, 25 Dec, 26 Dec
ITALIAN_FIXED_HOLIDAYS: Tuple[Tuple[int, int], ...] = (
    (1, 1),
    (1, 6),
    (4, 25),
    (5, 1),
    (6, 2),
    (8, 15),
    (11, 1),
    (12, 8),
    (12, 25),
    (12, 26),
)

SATURDAY: int = 5
SUNDAY: int = 6
ONE_DAY: timedelta = timedelta(days=1)


@dataclass(frozen=True)
class HolidayCalendar:
    """
    A national holiday calendar: fixed (month, day) holidays plus, optionally, Easter Sunday and Easter Monday
    """

    fixed_holidays: Tuple[Tuple[int, int], ...] = field(default=ITALIAN_FIXED_HOLIDAYS)
    easter: bool = True

    def holidays(self, year: int) -> List[date]:
        """
        Lists the holidays of a year in date order
        :param year: The calendar year
        :return: A sorted list of holiday dates
        """
        days: set[date] = {date(year, m, d) for m, d in self.fixed_holidays}
        if self.easter:
            sunday: date = easter_sunday(year)
            days.update({sunday, sunday + ONE_DAY})
        return sorted(days)


ITALIAN_CALENDAR: HolidayCalendar = HolidayCalendar()


def easter_sunday(year: int) -> date:
    """
    Computes Gregorian Easter Sunday with the anonymous Gregorian (Meeus/Jones/Butcher) computus
    :param year: The calendar year, within [1900, 2200]
    :return: The date of Easter Sunday
    """
    if not MIN_YEAR <= year <= MAX_YEAR:
        raise CalendarRangeError(
            f"Year {year} outside the supported range [{MIN_YEAR}, {MAX_YEAR}]"
        )

    a: int = year % 19
    b: int = year // 100
    c: int = year % 100
    d: int = b // 4
    e: int = b % 4
    f: int = (b + 8) // 25
    g: int = (b - f + 1) // 3
    h: int = (19 * a + b - d - g + 15) % 30
    i: int = c // 4
    k: int = c % 4
    l: int = (32 + 2 * e + 2 * i - h - k) % 7
    m: int = (a + 11 * h + 22 * l) // 451

    month: int = (h + l - 7 * m + 114) // 31
    day: int = ((h + l - 7 * m + 114) % 31) + 1
    return date(year, month, day)


def easter_monday(year: int) -> date:
    """Easter Sunday plus one day"""
    return easter_sunday(year) + ONE_DAY


def yearday(t: date) -> int:
    """
    Day number within the year of t, starting from 1 on January 1
    :param t: The date
    :return: An int in [1, 365] or [1, 366] on leap years
    """
    return t.timetuple().tm_yday


def year_length(year: int) -> int:
    """Number of days in a calendar year"""
    return (date(year + 1, 1, 1) - date(year, 1, 1)).days


def is_holiday(t: date, cal: HolidayCalendar = ITALIAN_CALENDAR) -> bool:
    """
    Checks whether t is a holiday of the calendar
    :param t: The date
    :param cal: The holiday calendar
    :return: True iff t is a fixed holiday or Easter Sunday/Monday of year(t)
    """
    if (t.month, t.day) in cal.fixed_holidays:
        return True
    if cal.easter:
        sunday: date = easter_sunday(t.year)
        return t == sunday or t == sunday + ONE_DAY
    return False


def is_working_day(t: date, cal: HolidayCalendar = ITALIAN_CALENDAR) -> bool:
    """
    A working day is a day different from Saturday and Sunday that is not a holiday
    :param t: The date
    :param cal: The holiday calendar
    :return: True if t is a working day
    """
    return t.weekday() not in (SATURDAY, SUNDAY) and not is_holiday(t, cal)


def is_day_after_holiday(t: date, cal: HolidayCalendar = ITALIAN_CALENDAR) -> bool:
    """
    Checks whether t is a working day whose physical predecessor t-1 is a holiday
    :param t: The date
    :param cal: The holiday calendar
    :return: True if t is the first working day after a holiday
    """
    return is_working_day(t, cal) and is_holiday(t - ONE_DAY, cal)


def is_bridge_holiday(t: date, cal: HolidayCalendar = ITALIAN_CALENDAR) -> bool:
    """
    Checks whether t is an isolated working day: both t-1 and t+1 are Saturday, Sunday or a holiday
    :param t: The date
    :param cal: The holiday calendar
    :return: True if t is a bridge holiday
    """
    return (
        is_working_day(t, cal)
        and not is_working_day(t - ONE_DAY, cal)
        and not is_working_day(t + ONE_DAY, cal)
    )


def _same_holiday_previous_year(t: date, cal: HolidayCalendar) -> date:
    # Fixed-date holidays win when Easter Monday falls on one (e.g. 2011-04-25)
    if (t.month, t.day) in cal.fixed_holidays:
        return date(t.year - 1, t.month, t.day)
    if t == easter_sunday(t.year):
        return easter_sunday(t.year - 1)
    return easter_monday(t.year - 1)


@lru_cache(maxsize=None)
def similar_day(t: date, cal: HolidayCalendar = ITALIAN_CALENDAR) -> date:
    """
    Maps t to its similar day in the previous year. A holiday maps to the same holiday one year earlier; any other
    day maps to the non-holiday day of year(t)-1 with the same weekday and the nearest yearday, the earlier one on ties
    :param t: The date
    :param cal: The holiday calendar
    :return: The similar day sim(t)
    """
    if is_holiday(t, cal):
        return _same_holiday_previous_year(t, cal)

    previous: int = t.year - 1
    if previous < MIN_YEAR:
        raise CalendarRangeError(f"No similar day for {t}: {previous} is out of range")

    target: int = yearday(t)
    length: int = year_length(previous)
    start: date = date(previous, 1, 1)

    for offset in range(0, length + 1):
        # Earlier candidate first so ties resolve to the earlier day
        for candidate_yd in (target - offset, target + offset):
            if not 1 <= candidate_yd <= length:
                continue
            tau: date = start + timedelta(days=candidate_yd - 1)
            if tau.weekday() == t.weekday() and not is_holiday(tau, cal):
                return tau

    # Unreachable for any calendar with fewer holidays than weeks in a year
    raise CalendarRangeError(f"No similar day found for {t}")
