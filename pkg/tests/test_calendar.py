from datetime import date, timedelta
from functools import lru_cache
from typing import Dict, List

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gas_forecast.calendar import (
    HolidayCalendar,
    ITALIAN_CALENDAR,
    easter_monday,
    easter_sunday,
    is_bridge_holiday,
    is_day_after_holiday,
    is_holiday,
    is_working_day,
    similar_day,
    year_length,
    yearday,
)
from gas_forecast.common.errors import CalendarRangeError

EASTER = {
    2010: date(2010, 4, 4),
    2011: date(2011, 4, 24),
    2012: date(2012, 4, 8),
    2013: date(2013, 3, 31),
    2014: date(2014, 4, 20),
    2015: date(2015, 4, 5),
    2016: date(2016, 3, 27),
    2017: date(2017, 4, 16),
    2018: date(2018, 4, 1),
    2019: date(2019, 4, 21),
    2020: date(2020, 4, 12),
}

days_2008_2017 = st.dates(
    min_value=date(2008, 1, 1), max_value=date(2017, 12, 31)
)


@lru_cache(maxsize=None)
def non_holidays_by_weekday(year: int) -> Dict[int, List[date]]:
    days: Dict[int, List[date]] = {weekday: [] for weekday in range(7)}
    for i in range(year_length(year)):
        d = date(year, 1, 1) + timedelta(days=i)
        if not is_holiday(d):
            days[d.weekday()].append(d)
    return days


def brute_force_similar_day(t: date) -> date:
    previous = t.year - 1
    if is_holiday(t):
        if (t.month, t.day) in ITALIAN_CALENDAR.fixed_holidays:
            return date(previous, t.month, t.day)
        if t == easter_sunday(t.year):
            return easter_sunday(previous)
        return easter_monday(previous)
    candidates = non_holidays_by_weekday(previous)[t.weekday()]
    return min(candidates, key=lambda c: (abs(yearday(c) - yearday(t)), c))


@pytest.mark.parametrize("year, expected", sorted(EASTER.items()))
def test_easter_sunday_matches_published_dates(year, expected):
    assert easter_sunday(year) == expected
    assert easter_sunday(year).weekday() == 6
    assert easter_monday(year) == expected + timedelta(days=1)


@pytest.mark.parametrize("year", [1899, 2201])
def test_easter_outside_supported_range(year):
    with pytest.raises(CalendarRangeError):
        easter_sunday(year)


@pytest.mark.parametrize(
    "t, expected",
    [
        (date(2017, 12, 25), True),
        (date(2017, 4, 17), True),
        (date(2017, 4, 16), True),
        (date(2017, 6, 2), True),
        (date(2017, 3, 1), False),
    ],
)
def test_is_holiday(t, expected):
    assert is_holiday(t) is expected


def test_calendar_without_easter():
    cal = HolidayCalendar(fixed_holidays=((1, 1),), easter=False)
    assert not is_holiday(date(2017, 4, 17), cal)
    assert cal.holidays(2017) == [date(2017, 1, 1)]


def test_day_after_holiday_and_bridge():
    # Jan 1 2017 is a Sunday
    assert is_day_after_holiday(date(2017, 1, 2))
    # Monday between Sunday and Liberation Day
    assert is_bridge_holiday(date(2017, 4, 24))
    assert not is_bridge_holiday(date(2017, 4, 26))
    assert not is_working_day(date(2017, 4, 22))


@given(days_2008_2017)
def test_flags_imply_working_day(t):
    if is_bridge_holiday(t) or is_day_after_holiday(t):
        assert is_working_day(t)


@pytest.mark.parametrize("year", [2016, 2017])
def test_yearday_is_a_bijection(year):
    days = [date(year, 1, 1) + timedelta(days=i) for i in range(year_length(year))]
    assert sorted(yearday(d) for d in days) == list(range(1, year_length(year) + 1))


@pytest.mark.parametrize(
    "t, expected",
    [
        (date(2017, 7, 12), date(2016, 7, 13)),
        (date(2017, 4, 16), date(2016, 3, 27)),
        (date(2017, 4, 17), date(2016, 3, 28)),
        (date(2017, 12, 25), date(2016, 12, 25)),
        # Easter Monday on Liberation Day maps through the fixed date
        (date(2011, 4, 25), date(2010, 4, 25)),
    ],
)
def test_similar_day_examples(t, expected):
    assert similar_day(t) == expected


def test_similar_day_of_leap_day():
    t = date(2016, 2, 29)
    assert similar_day(t) == brute_force_similar_day(t)


@pytest.mark.parametrize("year", range(2008, 2018))
def test_similar_day_matches_exhaustive_search(year):
    for i in range(year_length(year)):
        t = date(year, 1, 1) + timedelta(days=i)
        sim = similar_day(t)
        assert sim == brute_force_similar_day(t), t
        assert sim.year == year - 1
        if is_holiday(t):
            assert is_holiday(sim)
        else:
            assert sim.weekday() == t.weekday()
            assert not is_holiday(sim)


def test_similar_day_out_of_range():
    with pytest.raises(CalendarRangeError):
        similar_day(date(1900, 3, 7))
