#include "pec/reporting.hpp"

#include "pec/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace pec {

StrategyParams StrategyInput::resolve() const
{
    const bool has_rates = alpha || beta;
    const bool has_rts = r_open || r_close;
    if (has_rates && has_rts) {
        throw InvalidParameters("give either --alpha/--beta or --r-open/--r-close, not both");
    }
    const double g = gamma.value_or(default_gamma);
    if (has_rts) {
        if (!r_open || !r_close) {
            throw InvalidParameters("--r-open and --r-close must be given together");
        }
        StrategyParams p{g, *r_open, *r_close, i0, period};
        p.validate();
        return p;
    }
    if (has_rates && (!alpha || !beta)) {
        throw InvalidParameters("--alpha and --beta must be given together");
    }
    // Reference scenario when nothing is specified.
    GrowthRates rates{alpha.value_or(0.0410), beta.value_or(0.0553)};
    return StrategyParams::from_rates(rates, i0, period, g);
}

SimulationOrder parse_simulation_order(std::string_view text)
{
    if (text == "OC" || text == "oc") {
        return SimulationOrder::OC;
    }
    if (text == "CO" || text == "co") {
        return SimulationOrder::CO;
    }
    if (text == "OC-then-CO" || text == "oc-then-co") {
        return SimulationOrder::OCThenCO;
    }
    throw InvalidParameters("unknown order '" + std::string(text) + "', expected OC, CO or OC-then-CO");
}

std::string_view to_string(SimulationOrder order)
{
    switch (order) {
    case SimulationOrder::OC:
        return "OC";
    case SimulationOrder::CO:
        return "CO";
    case SimulationOrder::OCThenCO:
        break;
    }
    return "OC-then-CO";
}

PhaseSchedule simulation_schedule(const StrategyParams& params, SimulationOrder order)
{
    auto oc = PhaseSchedule::open_close(params);
    switch (order) {
    case SimulationOrder::OC:
        return oc;
    case SimulationOrder::CO:
        return swap_cycle(oc);
    case SimulationOrder::OCThenCO:
        break;
    }
    return oc.then(swap_cycle(oc));
}

namespace {

Json params_json(const StrategyParams& p)
{
    const auto rates = p.rates();
    Json j;
    j["gamma"] = p.gamma;
    j["r_open"] = p.r_open;
    j["r_close"] = p.r_close;
    j["alpha"] = rates.alpha;
    j["beta"] = rates.beta;
    j["i0"] = p.i0;
    j["period"] = p.period;
    return j;
}

Json phases_json(const PhaseSchedule& s)
{
    Json arr = Json::array();
    for (const auto& ph : s.phases()) {
        Json o;
        o["rt"] = ph.rt;
        o["duration"] = ph.duration;
        arr.push_back(std::move(o));
    }
    return arr;
}

Json optional_json(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

Json schedule_json(const StrategyParams& params)
{
    const auto len = phase_lengths(params);
    const auto oc = PhaseSchedule::open_close(params);
    const auto co = swap_cycle(oc);
    Json j;
    j["params"] = params_json(params);
    j["t_open"] = len.t_open;
    j["t_close"] = len.t_close;
    j["average_rt"] = average_rt(oc);
    j["oc_phases"] = phases_json(oc);
    j["co_phases"] = phases_json(co);
    return j;
}

Json trajectory_json(const Trajectory& traj, const PhaseSchedule& schedule, double gamma)
{
    Json j;
    j["gamma"] = gamma;
    j["order"] = to_string(schedule.order());
    j["period"] = schedule.period();
    j["phases"] = phases_json(schedule);
    Json bounds = Json::array();
    for (const auto& b : traj.phase_boundaries()) {
        bounds.push_back(Json{{"t", b.time}, {"active", b.active}});
    }
    j["phase_boundaries"] = std::move(bounds);
    Json samples = Json::array();
    for (size_t i = 0; i < traj.times.size(); ++i) {
        samples.push_back(Json{{"t", traj.times[i]}, {"active", traj.active[i]}});
    }
    j["samples"] = std::move(samples);
    return j;
}

std::string trajectory_csv(const Trajectory& traj)
{
    std::ostringstream out;
    out << "t,active\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        out << format_number(traj.times[i]) << ',' << format_number(traj.active[i]) << '\n';
    }
    return out.str();
}

Json compare_costs_json(const StrategyParams& params)
{
    const auto rates = params.rates();
    const auto oc = cost_oc(rates, params.i0, params.period, params.gamma);
    const auto co = cost_co(rates, params.i0, params.period, params.gamma);
    const auto flat = cost_const(params.i0, params.period, params.gamma);
    const auto len = phase_lengths(rates, params.period);
    Json j;
    j["params"] = params_json(params);
    j["t_open"] = len.t_open;
    j["t_close"] = len.t_close;
    j["c_oc"] = oc.auc_active;
    j["c_co"] = co.auc_active;
    j["c_const"] = flat.auc_active;
    j["ratio"] = cost_ratio(oc, co);
    j["i_max"] = oc.i_max;
    j["i_max_over_i0"] = oc.i_max / oc.i0;
    j["new_cases_oc"] = optional_json(oc.total_new_cases);
    j["new_cases_co"] = optional_json(co.total_new_cases);
    j["new_cases_const"] = optional_json(flat.total_new_cases);
    return j;
}

// ---------------------------------------------------------------------------

std::string sha256_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + file.string());
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 init failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(got)) != 1) {
            throw std::runtime_error("sha256 update failed");
        }
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
        throw std::runtime_error("sha256 final failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

bool SnapshotCheck::ok() const
{
    return std::all_of(files.begin(), files.end(), [](const SnapshotFile& f) { return f.ok(); });
}

std::string SnapshotCheck::report() const
{
    std::ostringstream out;
    out << "snapshot " << dir.string() << (manifest_found ? " (SHA256SUMS found)" : " (no SHA256SUMS)") << '\n';
    for (const auto& f : files) {
        out << "  " << (f.ok() ? "ok      " : "FAILED  ") << f.name;
        if (!f.exists) {
            out << "  missing";
        } else {
            out << "  " << f.size << " bytes  sha256 " << f.sha256;
            if (f.expected_sha256 && *f.expected_sha256 != f.sha256) {
                out << "  expected " << *f.expected_sha256;
            }
        }
        out << '\n';
    }
    return out.str();
}

SnapshotCheck check_snapshot(const std::filesystem::path& dir)
{
    SnapshotCheck check;
    check.dir = dir;
    std::map<std::string, std::string> manifest;
    std::ifstream sums(dir / "SHA256SUMS");
    if (sums) {
        check.manifest_found = true;
        std::string hash;
        std::string name;
        while (sums >> hash >> name) {
            if (!name.empty() && name.front() == '*') {
                name.erase(0, 1);
            }
            manifest[name] = hash;
        }
    }
    for (const char* name : {confirmed_file, deaths_file, recovered_file}) {
        SnapshotFile f;
        f.name = name;
        f.path = dir / name;
        std::error_code ec;
        f.exists = std::filesystem::is_regular_file(f.path, ec);
        if (f.exists) {
            f.size = std::filesystem::file_size(f.path, ec);
            f.sha256 = sha256_file(f.path);
        }
        if (auto it = manifest.find(name); it != manifest.end()) {
            f.expected_sha256 = it->second;
        }
        check.files.push_back(std::move(f));
    }
    return check;
}

CountryData load_country(const std::filesystem::path& dir, std::string_view country)
{
    const auto check = check_snapshot(dir);
    if (!check.ok()) {
        throw DataError("snapshot missing or corrupt\n" + check.report());
    }
    return CountryData{std::string(country),
                       parse_jhu_timeseries(dir / confirmed_file, country, SeriesKind::ConfirmedCumulative),
                       parse_jhu_timeseries(dir / deaths_file, country, SeriesKind::DeathsCumulative),
                       parse_jhu_timeseries(dir / recovered_file, country, SeriesKind::RecoveredCumulative)};
}

std::vector<DailySeries> ingest_series(const CountryData& data)
{
    return {data.confirmed, data.deaths, data.recovered, data.new_cases(), data.daily_deaths(), data.active()};
}

Json ingest_report_json(const CountryData& data)
{
    Json j;
    j["country"] = data.country;
    Json kinds = Json::array();
    for (const auto& s : ingest_series(data)) {
        const auto anomalies = find_anomalies(s);
        Json k;
        k["kind"] = to_string(s.kind());
        k["start"] = format_iso_date(s.start_date());
        k["end"] = format_iso_date(s.end_date());
        k["anomaly_count"] = anomalies.count();
        Json dates = Json::array();
        for (auto d : anomalies.dates) {
            dates.push_back(format_iso_date(d));
        }
        k["anomaly_dates"] = std::move(dates);
        kinds.push_back(std::move(k));
    }
    j["series"] = std::move(kinds);
    return j;
}

// ---------------------------------------------------------------------------

CfrModel fit_cfr(const DailySeries& confirmed, const DailySeries& deaths, const CfrFitOptions& options)
{
    const auto cases = moving_average(difference(confirmed), options.smoothing_days);
    const auto dead = moving_average(difference(deaths), options.smoothing_days);
    const auto cases_w = window(cases, options.from, options.to).series;
    const auto dead_w = window(dead, options.from, options.to).series;
    return fit(cases_w, dead_w, options.k_range);
}

Json cfr_model_json(const CfrModel& model)
{
    Json j;
    j["delay_k"] = model.kernel.delay_k;
    j["decay_a"] = model.kernel.decay_a;
    j["scale_b"] = model.kernel.scale_b;
    j["cfr"] = model.cfr;
    j["cv_a_percent"] = optional_json(model.cv_a);
    j["cv_b_percent"] = optional_json(model.cv_b);
    j["sse"] = model.sse;
    j["num_points"] = model.num_points;
    Json search = Json::array();
    for (const auto& e : model.k_search) {
        search.push_back(Json{{"delay_k", e.delay_k}, {"decay_a", e.decay_a}, {"scale_b", e.scale_b}, {"sse", e.sse}});
    }
    j["k_search"] = std::move(search);
    Json fitted = Json::array();
    for (size_t i = 0; i < model.fitted_deaths.size(); ++i) {
        fitted.push_back(Json{{"date", format_iso_date(model.fitted_deaths.date_at(i))},
                              {"value", model.fitted_deaths.values()[i]}});
    }
    j["fitted_deaths"] = std::move(fitted);
    return j;
}

ValidationReport validate(const CountryData& data, const ValidationOptions& options)
{
    if (options.cycle_days < 1) {
        throw InvalidParameters("cycle length must be at least one day");
    }
    const Date start = options.oc_start;
    const Date switch_date = add_days(start, options.cycle_days);
    const Date end = add_days(switch_date, options.cycle_days);

    ValidationReport r;
    r.oc_window = {start, add_days(switch_date, -1)};
    r.co_window = {switch_date, end};
    r.oc_cases = data.confirmed.at(switch_date) - data.confirmed.at(start);
    r.co_cases = data.confirmed.at(end) - data.confirmed.at(switch_date);

    const auto active = data.active();
    const auto oc_active = window(active, start, switch_date).series;
    const auto co_active = window(active, switch_date, end).series;
    const auto& ov = oc_active.values();
    const auto& cv = co_active.values();
    const auto peak = static_cast<size_t>(std::max_element(ov.begin(), ov.end()) - ov.begin());
    const auto nadir = static_cast<size_t>(std::min_element(cv.begin(), cv.end()) - cv.begin());
    r.anchors = {
        {"start", start, active.at(start)},
        {"oc_peak", oc_active.date_at(peak), ov[peak]},
        {"co_nadir", co_active.date_at(nadir), cv[nadir]},
        {"end", end, active.at(end)},
    };
    r.predicted_ratio_from_model = ov[peak] / active.at(start);

    if (options.cfr_override) {
        r.cfr_used = *options.cfr_override;
    } else {
        r.cfr_model = fit_cfr(data.confirmed, data.deaths, options.cfr_fit);
        r.cfr_used = r.cfr_model->cfr;
        r.cfr_fitted = true;
    }
    r.oc_deaths_est = r.oc_cases * r.cfr_used;
    r.co_deaths_est = r.co_cases * r.cfr_used;
    r.death_ratio = r.oc_cases / r.co_cases;
    return r;
}

Json validation_json(const ValidationReport& r)
{
    Json j;
    j["oc_window"] = {format_iso_date(r.oc_window.from), format_iso_date(r.oc_window.to)};
    j["co_window"] = {format_iso_date(r.co_window.from), format_iso_date(r.co_window.to)};
    j["oc_cases"] = r.oc_cases;
    j["co_cases"] = r.co_cases;
    j["cfr_used"] = r.cfr_used;
    j["cfr_source"] = r.cfr_fitted ? "fitted" : "override";
    j["oc_deaths_est"] = r.oc_deaths_est;
    j["co_deaths_est"] = r.co_deaths_est;
    j["death_ratio"] = r.death_ratio;
    j["predicted_ratio_from_model"] = r.predicted_ratio_from_model;
    Json anchors = Json::array();
    for (const auto& a : r.anchors) {
        anchors.push_back(Json{{"label", a.label}, {"date", format_iso_date(a.date)}, {"active", a.active}});
    }
    j["active_anchors"] = std::move(anchors);
    if (r.cfr_model) {
        Json m;
        m["delay_k"] = r.cfr_model->kernel.delay_k;
        m["decay_a"] = r.cfr_model->kernel.decay_a;
        m["scale_b"] = r.cfr_model->kernel.scale_b;
        m["cfr"] = r.cfr_model->cfr;
        m["sse"] = r.cfr_model->sse;
        j["cfr_model"] = std::move(m);
    }
    return j;
}

std::vector<ReferenceCheck> check_israel_reference(const ValidationReport& r)
{
    std::vector<ReferenceCheck> out;
    auto add = [&](std::string name, double value, double expected, double tol) {
        out.push_back({std::move(name), value, expected, tol, std::abs(value - expected) <= tol});
    };
    static const double anchor_values[] = {20876.0, 71114.0, 8697.0, 20791.0};
    for (size_t i = 0; i < r.anchors.size() && i < 4; ++i) {
        add("active_" + r.anchors[i].label + "_" + format_iso_date(r.anchors[i].date), r.anchors[i].active,
            anchor_values[i], 0.0);
    }
    add("oc_cases", r.oc_cases, 190000.0, 0.03 * 190000.0);
    add("co_cases", r.co_cases, 52000.0, 0.03 * 52000.0);
    add("oc_deaths_est", r.oc_deaths_est, 1600.0, 0.05 * 1600.0);
    add("co_deaths_est", r.co_deaths_est, 440.0, 0.05 * 440.0);
    add("death_ratio", r.death_ratio, 3.7, 0.2);
    add("predicted_ratio_from_model", r.predicted_ratio_from_model, 3.6, 0.2);
    return out;
}

} // namespace pec
