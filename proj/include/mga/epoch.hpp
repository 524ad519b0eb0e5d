#pragma once

#include <compare>
#include <string>

namespace mga
{

/// Instant on the MJD2000 scale: days elapsed since 2000-01-01 00:00.
struct Epoch
{
    double mjd2000{0.0};

    constexpr Epoch operator+(double days) const { return {mjd2000 + days}; }
    constexpr Epoch operator-(double days) const { return {mjd2000 - days}; }
    constexpr double operator-(Epoch other) const { return mjd2000 - other.mjd2000; }
    constexpr auto operator<=>(const Epoch &) const = default;
};

struct CalendarDate
{
    int year{2000};
    int month{1};
    int day{1};
    double day_fraction{0.0};
};

/// Gregorian calendar date (proleptic) to MJD2000.
Epoch from_calendar(int year, int month, int day, double day_fraction = 0.0);
Epoch from_calendar(const CalendarDate &date);

CalendarDate to_calendar(Epoch epoch);

/// "DD/MM/YY", the date style used in mission tables.
std::string format_ddmmyy(Epoch epoch);

/// "YYYY-MM-DD".
std::string format_iso_date(Epoch epoch);

}  // namespace mga
