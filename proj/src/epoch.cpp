#include "mga/epoch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace mga
{

namespace
{

constexpr std::chrono::sys_days kMjd2000Origin{std::chrono::year{2000} / std::chrono::January / 1};

}  // namespace

Epoch from_calendar(int year, int month, int day, double day_fraction)
{
    using namespace std::chrono;
    const sys_days date{std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} /
                        std::chrono::day{static_cast<unsigned>(day)}};
    return {static_cast<double>((date - kMjd2000Origin).count()) + day_fraction};
}

Epoch from_calendar(const CalendarDate &date)
{
    return from_calendar(date.year, date.month, date.day, date.day_fraction);
}

CalendarDate to_calendar(Epoch epoch)
{
    using namespace std::chrono;
    const double whole = std::floor(epoch.mjd2000);
    const sys_days date = kMjd2000Origin + days{static_cast<long>(whole)};
    const year_month_day ymd{date};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            static_cast<int>(static_cast<unsigned>(ymd.day())), epoch.mjd2000 - whole};
}

std::string format_ddmmyy(Epoch epoch)
{
    const CalendarDate c = to_calendar(epoch);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d/%02d/%02d", c.day, c.month, ((c.year % 100) + 100) % 100);
    return buf;
}

std::string format_iso_date(Epoch epoch)
{
    const CalendarDate c = to_calendar(epoch);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
}

}  // namespace mga
