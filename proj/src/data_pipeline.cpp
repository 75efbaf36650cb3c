#include "pec/data_pipeline.hpp"

#include "pec/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace pec {

namespace {

struct KindName {
    SeriesKind kind;
    std::string_view name;
};

constexpr KindName kind_names[] = {
    {SeriesKind::ConfirmedCumulative, "confirmed_cumulative"},
    {SeriesKind::DeathsCumulative, "deaths_cumulative"},
    {SeriesKind::RecoveredCumulative, "recovered_cumulative"},
    {SeriesKind::NewCases, "new_cases"},
    {SeriesKind::DailyDeaths, "daily_deaths"},
    {SeriesKind::ActiveCases, "active_cases"},
};

void strip_line_end(std::string& line)
{
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
        line.pop_back();
    }
}

std::optional<double> parse_number(std::string_view s)
{
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    while (!s.empty() && s.back() == ' ') {
        s.remove_suffix(1);
    }
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

DailySeries cumulative_kind_to_daily(const DailySeries& s, std::vector<double> values)
{
    SeriesKind kind = SeriesKind::NewCases;
    switch (s.kind()) {
    case SeriesKind::ConfirmedCumulative:
        break;
    case SeriesKind::DeathsCumulative:
        kind = SeriesKind::DailyDeaths;
        break;
    default:
        throw DataError("difference: no daily kind for " + std::string(to_string(s.kind())));
    }
    return {add_days(s.start_date(), 1), std::move(values), kind};
}

} // namespace

std::string_view to_string(SeriesKind kind)
{
    for (const auto& kn : kind_names) {
        if (kn.kind == kind) {
            return kn.name;
        }
    }
    return "unknown";
}

SeriesKind parse_series_kind(std::string_view text)
{
    for (const auto& kn : kind_names) {
        if (kn.name == text) {
            return kn.kind;
        }
    }
    throw DataError("unknown series kind '" + std::string(text) + "'");
}

bool is_cumulative(SeriesKind kind)
{
    return kind == SeriesKind::ConfirmedCumulative || kind == SeriesKind::DeathsCumulative ||
           kind == SeriesKind::RecoveredCumulative;
}

DailySeries::DailySeries(Date start, std::vector<double> values, SeriesKind kind)
    : start_(start), values_(std::move(values)), kind_(kind)
{}

bool DailySeries::contains(Date d) const
{
    return !values_.empty() && d >= start_ && d <= end_date();
}

double DailySeries::at(Date d) const
{
    if (!contains(d)) {
        throw DataError("date " + format_iso_date(d) + " outside series range");
    }
    return values_[static_cast<size_t>(days_between(start_, d))];
}

SeriesAnomalies find_anomalies(const DailySeries& series)
{
    SeriesAnomalies out;
    const auto& v = series.values();
    if (is_cumulative(series.kind())) {
        for (size_t i = 1; i < v.size(); ++i) {
            if (v[i] < v[i - 1]) {
                out.dates.push_back(series.date_at(i));
            }
        }
    } else {
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0.0) {
                out.dates.push_back(series.date_at(i));
            }
        }
    }
    return out;
}

std::vector<std::string> JhuTable::countries() const
{
    std::set<std::string> names;
    for (const auto& row : rows) {
        names.insert(row.country);
    }
    return {names.begin(), names.end()};
}

DailySeries JhuTable::country_series(std::string_view country, SeriesKind kind) const
{
    std::vector<double> total(num_days, 0.0);
    bool found = false;
    for (const auto& row : rows) {
        if (row.country != country) {
            continue;
        }
        found = true;
        for (size_t i = 0; i < num_days; ++i) {
            total[i] += row.values[i];
        }
    }
    if (!found) {
        std::string msg = "unknown country '" + std::string(country) + "'; available:";
        for (const auto& c : countries()) {
            msg += " " + c + ";";
        }
        throw DataError(msg);
    }
    return {first_date, std::move(total), kind};
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) {
        throw DataError("unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

JhuTable parse_jhu_table(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty file, expected JHU header", 1);
    }
    strip_line_end(line);
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
        line.erase(0, 3);
    }
    std::vector<std::string> header;
    try {
        header = split_csv_line(line);
    } catch (const DataError& e) {
        throw DataError(e.what(), 1);
    }
    static const char* expected[] = {"Province/State", "Country/Region", "Lat", "Long"};
    if (header.size() < 5) {
        throw DataError("malformed header, expected '" + std::string(jhu_header_prefix) +
                            "' followed by date columns",
                        1);
    }
    for (size_t i = 0; i < 4; ++i) {
        if (header[i] != expected[i]) {
            throw DataError("malformed header, expected '" + std::string(jhu_header_prefix) + "'", 1);
        }
    }

    JhuTable table;
    std::optional<Date> prev;
    for (size_t i = 4; i < header.size(); ++i) {
        auto d = parse_jhu_date(header[i]);
        if (!d) {
            throw DataError("malformed date column '" + header[i] + "'", 1);
        }
        if (prev && *d != add_days(*prev, 1)) {
            throw DataError("date columns not contiguous: " + format_iso_date(*prev) + " followed by " +
                                format_iso_date(*d),
                            1);
        }
        if (!prev) {
            table.first_date = *d;
        }
        prev = d;
    }
    table.num_days = header.size() - 4;

    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_line_end(line);
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(line);
        } catch (const DataError& e) {
            throw DataError(e.what(), line_no);
        }
        if (fields.size() != header.size()) {
            throw DataError("ragged row: " + std::to_string(fields.size()) + " fields, header has " +
                                std::to_string(header.size()),
                            line_no);
        }
        JhuRow row;
        row.province = fields[0];
        row.country = fields[1];
        row.line = line_no;
        row.values.reserve(table.num_days);
        for (size_t i = 4; i < fields.size(); ++i) {
            auto v = parse_number(fields[i]);
            if (!v) {
                throw DataError("invalid value '" + fields[i] + "' in column " + header[i], line_no);
            }
            row.values.push_back(*v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

JhuTable parse_jhu_table(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + file.string());
    }
    try {
        return parse_jhu_table(in);
    } catch (const DataError& e) {
        throw DataError(file.string() + ": " + e.what());
    }
}

DailySeries parse_jhu_timeseries(std::istream& in, std::string_view country, SeriesKind kind)
{
    return parse_jhu_table(in).country_series(country, kind);
}

DailySeries parse_jhu_timeseries(const std::filesystem::path& file, std::string_view country,
                                 SeriesKind kind)
{
    return parse_jhu_table(file).country_series(country, kind);
}

DailySeries difference(const DailySeries& cumulative)
{
    if (cumulative.size() < 2) {
        throw DataError("difference needs at least two values");
    }
    const auto& v = cumulative.values();
    std::vector<double> out(v.size() - 1);
    for (size_t i = 1; i < v.size(); ++i) {
        out[i - 1] = v[i] - v[i - 1];
    }
    return cumulative_kind_to_daily(cumulative, std::move(out));
}

DailySeries cumulative_sum(const DailySeries& daily, double anchor, SeriesKind kind)
{
    std::vector<double> out;
    out.reserve(daily.size() + 1);
    out.push_back(anchor);
    double acc = anchor;
    for (double v : daily.values()) {
        acc += v;
        out.push_back(acc);
    }
    return {add_days(daily.start_date(), -1), std::move(out), kind};
}

DailySeries active_cases(const DailySeries& confirmed, const DailySeries& deaths,
                         const DailySeries& recovered)
{
    if (confirmed.empty() || deaths.empty() || recovered.empty()) {
        throw DataError("active_cases: empty input series");
    }
    const Date from = std::max({confirmed.start_date(), deaths.start_date(), recovered.start_date()});
    const Date to = std::min({confirmed.end_date(), deaths.end_date(), recovered.end_date()});
    if (from > to) {
        throw DataError("active_cases: series do not share any date");
    }
    std::vector<double> out;
    out.reserve(static_cast<size_t>(days_between(from, to)) + 1);
    for (Date d = from; d <= to; d = add_days(d, 1)) {
        out.push_back(confirmed.at(d) - deaths.at(d) - recovered.at(d));
    }
    return {from, std::move(out), SeriesKind::ActiveCases};
}

WindowResult window(const DailySeries& series, Date from, Date to)
{
    if (from > to) {
        throw DataError("window: start " + format_iso_date(from) + " is after end " + format_iso_date(to));
    }
    if (series.empty() || to < series.start_date() || from > series.end_date()) {
        throw DataError("window [" + format_iso_date(from) + ", " + format_iso_date(to) +
                        "] does not intersect the series");
    }
    WindowResult r{series, false};
    const Date lo = std::max(from, series.start_date());
    const Date hi = std::min(to, series.end_date());
    r.clipped = lo != from || hi != to;
    const auto first = static_cast<size_t>(days_between(series.start_date(), lo));
    const auto count = static_cast<size_t>(days_between(lo, hi)) + 1;
    const auto& v = series.values();
    r.series = DailySeries(lo, std::vector<double>(v.begin() + static_cast<long>(first),
                                                   v.begin() + static_cast<long>(first + count)),
                           series.kind());
    return r;
}

DailySeries moving_average(const DailySeries& series, int window_days)
{
    if (window_days < 1) {
        throw DataError("moving_average: window must be at least 1 day");
    }
    const auto w = static_cast<size_t>(window_days);
    if (series.size() < w) {
        throw DataError("moving_average: series shorter than the window");
    }
    const auto& v = series.values();
    std::vector<double> out;
    out.reserve(v.size() - w + 1);
    // Each mean is summed afresh so values do not depend on running drift.
    for (size_t end = w; end <= v.size(); ++end) {
        double sum = 0.0;
        for (size_t i = end - w; i < end; ++i) {
            sum += v[i];
        }
        out.push_back(sum / static_cast<double>(w));
    }
    return {add_days(series.start_date(), window_days - 1), std::move(out), series.kind()};
}

std::pair<DailySeries, DailySeries> align(const DailySeries& a, const DailySeries& b)
{
    if (a.empty() || b.empty()) {
        throw DataError("align: empty series");
    }
    const Date from = std::max(a.start_date(), b.start_date());
    const Date to = std::min(a.end_date(), b.end_date());
    if (from > to) {
        throw DataError("series date ranges do not overlap: [" + format_iso_date(a.start_date()) + ", " +
                        format_iso_date(a.end_date()) + "] vs [" + format_iso_date(b.start_date()) + ", " +
                        format_iso_date(b.end_date()) + "]");
    }
    return {window(a, from, to).series, window(b, from, to).series};
}

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_number failed");
    }
    return std::string(buf, ptr);
}

namespace {

struct LongRecord {
    Date date;
    size_t series_index;
    double value;
};

std::vector<LongRecord> long_records(std::span<const DailySeries> series)
{
    std::vector<LongRecord> recs;
    for (size_t s = 0; s < series.size(); ++s) {
        for (size_t i = 0; i < series[s].size(); ++i) {
            recs.push_back({series[s].date_at(i), s, series[s].values()[i]});
        }
    }
    std::stable_sort(recs.begin(), recs.end(), [](const LongRecord& x, const LongRecord& y) {
        return x.date < y.date || (x.date == y.date && x.series_index < y.series_index);
    });
    return recs;
}

class SeriesCollector {
public:
    void add(Date d, SeriesKind kind, double value, long line)
    {
        auto it = index_.find(kind);
        if (it == index_.end()) {
            index_.emplace(kind, builders_.size());
            builders_.push_back({d, {value}, kind});
            return;
        }
        auto& b = builders_[it->second];
        const Date expected = add_days(b.start, static_cast<long>(b.values.size()));
        if (d != expected) {
            throw DataError("kind " + std::string(to_string(kind)) + ": expected date " +
                                format_iso_date(expected) + ", got " + format_iso_date(d),
                            line);
        }
        b.values.push_back(value);
    }

    std::vector<DailySeries> finish()
    {
        std::vector<DailySeries> out;
        out.reserve(builders_.size());
        for (auto& b : builders_) {
            out.emplace_back(b.start, std::move(b.values), b.kind);
        }
        return out;
    }

private:
    struct Builder {
        Date start;
        std::vector<double> values;
        SeriesKind kind;
    };
    std::map<SeriesKind, size_t> index_;
    std::vector<Builder> builders_;
};

} // namespace

void write_long_csv(std::ostream& out, std::span<const DailySeries> series)
{
    out << "date,kind,value\n";
    for (const auto& r : long_records(series)) {
        out << format_iso_date(r.date) << ',' << to_string(series[r.series_index].kind()) << ','
            << format_number(r.value) << '\n';
    }
}

std::string to_long_json(std::span<const DailySeries> series)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : long_records(series)) {
        nlohmann::ordered_json o;
        o["date"] = format_iso_date(r.date);
        o["kind"] = to_string(series[r.series_index].kind());
        o["value"] = r.value;
        arr.push_back(std::move(o));
    }
    return arr.dump(2);
}

std::vector<DailySeries> read_long_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty long-format CSV", 1);
    }
    strip_line_end(line);
    if (line != "date,kind,value") {
        throw DataError("expected header 'date,kind,value'", 1);
    }
    SeriesCollector collect;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_line_end(line);
        if (line.empty()) {
            continue;
        }
        auto f = split_csv_line(line);
        if (f.size() != 3) {
            throw DataError("expected 3 fields", line_no);
        }
        auto v = parse_number(f[2]);
        if (!v) {
            throw DataError("invalid value '" + f[2] + "'", line_no);
        }
        try {
            collect.add(parse_iso_date(f[0]), parse_series_kind(f[1]), *v, line_no);
        } catch (const DataError& e) {
            if (e.line() >= 0) {
                throw;
            }
            throw DataError(e.what(), line_no);
        }
    }
    return collect.finish();
}

std::vector<DailySeries> read_long_json(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw DataError("expected a JSON array of {date, kind, value} records");
    }
    SeriesCollector collect;
    long idx = 0;
    for (const auto& rec : doc) {
        try {
            collect.add(parse_iso_date(rec.at("date").get<std::string>()),
                        parse_series_kind(rec.at("kind").get<std::string>()), rec.at("value").get<double>(),
                        idx);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("record " + std::to_string(idx) + ": " + e.what());
        }
        ++idx;
    }
    return collect.finish();
}

} // namespace pec
