from .driver import (
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
