#pragma once

#include "pec/date.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pec {

enum class SeriesKind {
    ConfirmedCumulative,
    DeathsCumulative,
    RecoveredCumulative,
    NewCases,
    DailyDeaths,
    ActiveCases,
};

std::string_view to_string(SeriesKind kind);
SeriesKind parse_series_kind(std::string_view text);
bool is_cumulative(SeriesKind kind);

/// One value per consecutive calendar day starting at start_date().
class DailySeries {
public:
    DailySeries(Date start, std::vector<double> values, SeriesKind kind);

    Date start_date() const noexcept { return start_; }
    /// Last covered day. Undefined for an empty series.
    Date end_date() const noexcept { return add_days(start_, static_cast<long>(values_.size()) - 1); }
    size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    SeriesKind kind() const noexcept { return kind_; }
    const std::vector<double>& values() const noexcept { return values_; }

    Date date_at(size_t i) const { return add_days(start_, static_cast<long>(i)); }
    bool contains(Date d) const;
    /// Value on a given day; throws DataError outside the covered range.
    double at(Date d) const;

    DailySeries with_kind(SeriesKind kind) const { return {start_, values_, kind}; }

    friend bool operator==(const DailySeries&, const DailySeries&) = default;

private:
    Date start_;
    std::vector<double> values_;
    SeriesKind kind_;
};

/// Days where a cumulative series decreases, or a daily series is negative.
struct SeriesAnomalies {
    std::vector<Date> dates;
    size_t count() const { return dates.size(); }
};

SeriesAnomalies find_anomalies(const DailySeries& series);

// ---------------------------------------------------------------------------
// JHU CSSE global time-series files

inline constexpr std::string_view jhu_header_prefix = "Province/State,Country/Region,Lat,Long";

struct JhuRow {
    std::string province;
    std::string country;
    std::vector<double> values;
    long line = 0;
};

/// A whole wide-format file: contiguous date columns and one row per region.
struct JhuTable {
    Date first_date;
    size_t num_days = 0;
    std::vector<JhuRow> rows;

    std::vector<std::string> countries() const;

    /// Sum of all province rows of a country. Throws DataError listing the
    /// available countries when none match.
    DailySeries country_series(std::string_view country, SeriesKind kind) const;
};

/// Splits one CSV record, honouring double-quoted fields with embedded commas.
std::vector<std::string> split_csv_line(std::string_view line);

JhuTable parse_jhu_table(std::istream& in);
JhuTable parse_jhu_table(const std::filesystem::path& file);

DailySeries parse_jhu_timeseries(std::istream& in, std::string_view country, SeriesKind kind);
DailySeries parse_jhu_timeseries(const std::filesystem::path& file, std::string_view country,
                                 SeriesKind kind);

// ---------------------------------------------------------------------------
// Series transforms

/// daily[t] = cum[t] - cum[t-1]; starts one day after the input.
DailySeries difference(const DailySeries& cumulative);

/// Inverse of difference(): running sum anchored at a first cumulative value.
DailySeries cumulative_sum(const DailySeries& daily, double anchor, SeriesKind kind);

/// confirmed - deaths - recovered over the common dates.
DailySeries active_cases(const DailySeries& confirmed, const DailySeries& deaths,
                         const DailySeries& recovered);

struct WindowResult {
    DailySeries series;
    bool clipped = false; // requested edges extended past the data
};

/// Inclusive [from, to] slice.
WindowResult window(const DailySeries& series, Date from, Date to);

/// Trailing mean over window_days; the first window_days - 1 days are dropped.
DailySeries moving_average(const DailySeries& series, int window_days);

/// Restricts both series to their common dates; throws if they do not overlap.
std::pair<DailySeries, DailySeries> align(const DailySeries& a, const DailySeries& b);

// ---------------------------------------------------------------------------
// Long-format output: date,kind,value

/// Shortest round-tripping decimal representation.
std::string format_number(double v);

void write_long_csv(std::ostream& out, std::span<const DailySeries> series);
std::string to_long_json(std::span<const DailySeries> series);

std::vector<DailySeries> read_long_csv(std::istream& in);
std::vector<DailySeries> read_long_json(std::string_view text);

} // namespace pec
