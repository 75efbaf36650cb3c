#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace pec {

using Date = std::chrono::sys_days;

inline Date make_date(int y, unsigned m, unsigned d)
{
    return std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d};
}

/// Parses YYYY-MM-DD. Throws DataError on anything else.
Date parse_iso_date(std::string_view text);

/// Parses the JHU header format m/d/yy (two-digit year maps to 20yy).
std::optional<Date> parse_jhu_date(std::string_view text);

std::string format_iso_date(Date d);
std::string format_jhu_date(Date d);

inline long days_between(Date from, Date to) { return (to - from).count(); }

inline Date add_days(Date d, long n) { return d + std::chrono::days{n}; }

} // namespace pec
