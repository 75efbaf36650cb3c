#include "pec/date.hpp"

#include "pec/errors.hpp"

#include <charconv>
#include <cstdio>

namespace pec {

namespace {

std::optional<int> parse_uint(std::string_view s)
{
    if (s.empty() || s.size() > 4) {
        return std::nullopt;
    }
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) {
        return std::nullopt;
    }
    return v;
}

std::optional<Date> checked_date(int y, int m, int d)
{
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month(static_cast<unsigned>(m)),
                                    std::chrono::day(static_cast<unsigned>(d))};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{ymd};
}

} // namespace

Date parse_iso_date(std::string_view text)
{
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        auto y = parse_uint(text.substr(0, 4));
        auto m = parse_uint(text.substr(5, 2));
        auto d = parse_uint(text.substr(8, 2));
        if (y && m && d) {
            if (auto date = checked_date(*y, *m, *d)) {
                return *date;
            }
        }
    }
    throw DataError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
}

std::optional<Date> parse_jhu_date(std::string_view text)
{
    auto s1 = text.find('/');
    if (s1 == std::string_view::npos) {
        return std::nullopt;
    }
    auto s2 = text.find('/', s1 + 1);
    if (s2 == std::string_view::npos) {
        return std::nullopt;
    }
    auto m = parse_uint(text.substr(0, s1));
    auto d = parse_uint(text.substr(s1 + 1, s2 - s1 - 1));
    auto yy = text.substr(s2 + 1);
    auto y = parse_uint(yy);
    if (!m || !d || !y || yy.size() != 2) {
        return std::nullopt;
    }
    return checked_date(2000 + *y, *m, *d);
}

std::string format_iso_date(Date d)
{
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_jhu_date(Date d)
{
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u/%u/%02d", static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(ymd.year()) % 100);
    return buf;
}

} // namespace pec
