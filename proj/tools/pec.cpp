// pec: periodic epidemic control command-line front end.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <CLI11.hpp>

#include "pec/errors.hpp"
#include "pec/reporting.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_input = 2;
constexpr int exit_validation = 3;

struct Settings {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double r_open = 0.0;
    double r_close = 0.0;
    double i0 = 21000.0;
    double period = 54.0;
    double step = 1.0;
    std::string order = "OC-then-CO";
    std::string country = "Israel";
    std::string from = "2020-06-01";
    std::string to = "2020-12-29";
    int k_min = 0;
    int k_max = 15;
    std::string oc_start = "2020-08-30";
    int cycle_days = 54;
    double cfr = 0.0;
    bool check = false;
    std::string data_dir = "data/jhu";
    std::string until;
    std::string format = "json";
    std::string out;
};

struct ParamOptions {
    CLI::Option* alpha = nullptr;
    CLI::Option* beta = nullptr;
    CLI::Option* gamma = nullptr;
    CLI::Option* r_open = nullptr;
    CLI::Option* r_close = nullptr;
    CLI::Option* cfr = nullptr;
};

pec::StrategyInput strategy_input(const Settings& s, const ParamOptions& o)
{
    pec::StrategyInput in;
    if (o.alpha->count()) {
        in.alpha = s.alpha;
    }
    if (o.beta->count()) {
        in.beta = s.beta;
    }
    if (o.gamma->count()) {
        in.gamma = s.gamma;
    }
    if (o.r_open->count()) {
        in.r_open = s.r_open;
    }
    if (o.r_close->count()) {
        in.r_close = s.r_close;
    }
    in.i0 = s.i0;
    in.period = s.period;
    return in;
}

void emit(const Settings& s, const std::string& text)
{
    if (s.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(s.out, std::ios::binary);
    if (!f) {
        throw pec::DataError("cannot write " + s.out);
    }
    f << text;
}

std::string dump(const pec::Json& j)
{
    return j.dump(2) + "\n";
}

std::string metric_csv(const pec::Json& j)
{
    std::ostringstream out;
    out << "metric,value\n";
    for (const auto& [key, value] : j.items()) {
        if (value.is_number()) {
            out << key << ',' << pec::format_number(value.get<double>()) << '\n';
        } else if (value.is_string()) {
            out << key << ',' << value.get<std::string>() << '\n';
        }
    }
    return out.str();
}

int run_schedule(const Settings& s, const ParamOptions& o)
{
    const auto params = strategy_input(s, o).resolve();
    const auto j = pec::schedule_json(params);
    std::fprintf(stderr, "phase    rt        days\n");
    std::fprintf(stderr, "open     %-8.4g  %.3f\n", params.r_open, j["t_open"].get<double>());
    std::fprintf(stderr, "close    %-8.4g  %.3f\n", params.r_close, j["t_close"].get<double>());
    std::fprintf(stderr, "average R_t over the cycle: %.12g\n", j["average_rt"].get<double>());
    if (s.format == "csv") {
        std::ostringstream out;
        out << "cycle,index,rt,duration\n";
        for (const char* key : {"oc_phases", "co_phases"}) {
            int i = 0;
            for (const auto& ph : j[key]) {
                out << (key[0] == 'o' ? "OC" : "CO") << ',' << i++ << ','
                    << pec::format_number(ph["rt"].get<double>()) << ','
                    << pec::format_number(ph["duration"].get<double>()) << '\n';
            }
        }
        emit(s, out.str());
    } else {
        emit(s, dump(j));
    }
    return exit_ok;
}

int run_simulate(const Settings& s, const ParamOptions& o)
{
    const auto params = strategy_input(s, o).resolve();
    const auto schedule = pec::simulation_schedule(params, pec::parse_simulation_order(s.order));
    const auto traj = pec::solve_trajectory(params.i0, schedule, params.gamma, s.step);
    const auto& a = traj.active;
    const auto peak = std::max_element(a.begin(), a.end()) - a.begin();
    std::fprintf(stderr, "%s over %.1f days: peak %.0f at t=%g, final %.0f\n",
                 std::string(pec::to_string(pec::parse_simulation_order(s.order))).c_str(), schedule.period(),
                 a[static_cast<size_t>(peak)], traj.times[static_cast<size_t>(peak)], a.back());
    if (s.format == "csv") {
        emit(s, pec::trajectory_csv(traj));
    } else {
        auto j = pec::trajectory_json(traj, schedule, params.gamma);
        j["simulation_order"] = pec::to_string(pec::parse_simulation_order(s.order));
        emit(s, dump(j));
    }
    return exit_ok;
}

int run_compare_costs(const Settings& s, const ParamOptions& o)
{
    const auto params = strategy_input(s, o).resolve();
    auto j = pec::compare_costs_json(params);
    std::fprintf(stderr, "C_oc     %.3g person-days\n", j["c_oc"].get<double>());
    std::fprintf(stderr, "C_co     %.3g person-days\n", j["c_co"].get<double>());
    std::fprintf(stderr, "C_const  %.3g person-days\n", j["c_const"].get<double>());
    std::fprintf(stderr, "C_oc/C_co = %.3g, I_max/I_0 = %.3g\n", j["ratio"].get<double>(),
                 j["i_max_over_i0"].get<double>());
    if (s.format == "csv") {
        j.erase("params");
        emit(s, metric_csv(j));
    } else {
        emit(s, dump(j));
    }
    return exit_ok;
}

pec::CfrFitOptions cfr_options(const Settings& s)
{
    pec::CfrFitOptions opt;
    opt.from = pec::parse_iso_date(s.from);
    opt.to = pec::parse_iso_date(s.to);
    opt.k_range = {s.k_min, s.k_max};
    return opt;
}

int run_fit_cfr(const Settings& s)
{
    const auto data = pec::load_country(s.data_dir, s.country);
    const auto model = pec::fit_cfr(data.confirmed, data.deaths, cfr_options(s));
    std::fprintf(stderr, "k = %d, a = %.4g, b = %.4g, CFR = %.3g, SSE = %.4g\n", model.kernel.delay_k,
                 model.kernel.decay_a, model.kernel.scale_b, model.cfr, model.sse);
    if (s.format == "csv") {
        auto j = pec::cfr_model_json(model);
        j.erase("k_search");
        j.erase("fitted_deaths");
        emit(s, metric_csv(j));
    } else {
        emit(s, dump(pec::cfr_model_json(model)));
    }
    return exit_ok;
}

int run_ingest(const Settings& s)
{
    const auto data = pec::load_country(s.data_dir, s.country);
    const auto report = pec::ingest_report_json(data);
    for (const auto& k : report["series"]) {
        std::fprintf(stderr, "%-22s %s .. %s  anomalies: %zu\n", k["kind"].get<std::string>().c_str(),
                     k["start"].get<std::string>().c_str(), k["end"].get<std::string>().c_str(),
                     k["anomaly_count"].get<size_t>());
    }
    const auto series = pec::ingest_series(data);
    if (s.format == "csv") {
        std::ostringstream out;
        pec::write_long_csv(out, series);
        emit(s, out.str());
    } else {
        emit(s, pec::to_long_json(series) + "\n");
    }
    return exit_ok;
}

int run_validate(const Settings& s, const ParamOptions& o)
{
    const auto data = pec::load_country(s.data_dir, s.country);
    pec::ValidationOptions opt;
    opt.oc_start = pec::parse_iso_date(s.oc_start);
    opt.cycle_days = s.cycle_days;
    opt.cfr_fit = cfr_options(s);
    if (o.cfr->count()) {
        opt.cfr_override = s.cfr;
    }
    const auto report = pec::validate(data, opt);
    auto j = pec::validation_json(report);
    std::fprintf(stderr, "OC %s..%s: %.3g cases, %.3g deaths\n", j["oc_window"][0].get<std::string>().c_str(),
                 j["oc_window"][1].get<std::string>().c_str(), report.oc_cases, report.oc_deaths_est);
    std::fprintf(stderr, "CO %s..%s: %.3g cases, %.3g deaths\n", j["co_window"][0].get<std::string>().c_str(),
                 j["co_window"][1].get<std::string>().c_str(), report.co_cases, report.co_deaths_est);
    std::fprintf(stderr, "death ratio %.3g, predicted I_max/I_0 %.3g (CFR %.3g)\n", report.death_ratio,
                 report.predicted_ratio_from_model, report.cfr_used);

    bool pass = true;
    if (s.check) {
        pec::Json checks = pec::Json::array();
        for (const auto& c : pec::check_israel_reference(report)) {
            std::fprintf(stderr, "[%s] %s = %.6g (expected %.6g +- %.4g)\n", c.pass ? "PASS" : "FAIL",
                         c.name.c_str(), c.value, c.expected, c.tolerance);
            checks.push_back(pec::Json{{"name", c.name}, {"value", c.value}, {"expected", c.expected},
                                       {"tolerance", c.tolerance}, {"pass", c.pass}});
            pass = pass && c.pass;
        }
        j["reference_checks"] = std::move(checks);
    }
    if (s.format == "csv") {
        emit(s, metric_csv(j));
    } else {
        emit(s, dump(j));
    }
    return pass ? exit_ok : exit_validation;
}

std::string csv_field(const std::string& f)
{
    if (f.find_first_of(",\"") == std::string::npos) {
        return f;
    }
    std::string q = "\"";
    for (char c : f) {
        q += c;
        if (c == '"') {
            q += '"';
        }
    }
    return q + "\"";
}

// Keeps the four key columns and every date column up to `until`.
std::string truncate_jhu_csv(const std::string& body, pec::Date until)
{
    std::istringstream in(body);
    std::ostringstream out;
    std::string line;
    size_t keep = 0;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = pec::split_csv_line(line);
        if (header) {
            keep = 4;
            while (keep < fields.size()) {
                auto d = pec::parse_jhu_date(fields[keep]);
                if (!d || *d > until) {
                    break;
                }
                ++keep;
            }
            header = false;
        }
        for (size_t i = 0; i < keep && i < fields.size(); ++i) {
            out << (i ? "," : "") << csv_field(fields[i]);
        }
        out << '\n';
    }
    return out.str();
}

int run_fetch(const Settings& s)
{
    std::fprintf(stderr, "fetch: downloading live data; results are NOT reproducible (upstream revises history)\n");
    httplib::Client cli("https://raw.githubusercontent.com");
    cli.set_follow_location(true);
    cli.set_read_timeout(120, 0);
    std::filesystem::create_directories(s.data_dir);
    const std::string base = "/CSSEGISandData/COVID-19/master/csse_covid_19_data/csse_covid_19_time_series/";
    std::optional<pec::Date> until;
    if (!s.until.empty()) {
        until = pec::parse_iso_date(s.until);
    }
    std::ostringstream sums;
    for (const char* name : {pec::confirmed_file, pec::deaths_file, pec::recovered_file}) {
        auto res = cli.Get(base + name);
        if (!res || res->status != 200) {
            throw pec::DataError(std::string("download failed for ") + name +
                                 (res ? ": HTTP " + std::to_string(res->status)
                                      : ": " + httplib::to_string(res.error())));
        }
        const auto body = until ? truncate_jhu_csv(res->body, *until) : res->body;
        const auto path = std::filesystem::path(s.data_dir) / name;
        std::ofstream(path, std::ios::binary) << body;
        sums << pec::sha256_file(path) << "  " << name << '\n';
        std::fprintf(stderr, "wrote %s (%zu bytes)\n", path.string().c_str(), body.size());
    }
    std::ofstream(std::filesystem::path(s.data_dir) / "SHA256SUMS", std::ios::binary) << sums.str();
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Periodic epidemic control: schedules, costs, CFR fitting and validation on JHU data"};
    app.set_config("--config", "", "key = value file mirroring the long flags (flags override it)");
    app.require_subcommand(1);

    Settings s;
    ParamOptions o;
    o.alpha = app.add_option("--alpha", s.alpha, "growth rate of active cases while open, 1/day");
    o.beta = app.add_option("--beta", s.beta, "decay rate of active cases while closed, 1/day");
    o.gamma = app.add_option("--gamma", s.gamma, "removal rate, 1/day (default 1/14)");
    o.r_open = app.add_option("--r-open", s.r_open, "reproduction number while open (> 1)");
    o.r_close = app.add_option("--r-close", s.r_close, "reproduction number while closed (in [0, 1))");
    app.add_option("--i0", s.i0, "initial active cases")->capture_default_str();
    app.add_option("--period", s.period, "cycle length T, days")->capture_default_str();
    app.add_option("--step", s.step, "trajectory sampling step, days")->capture_default_str();
    app.add_option("--order", s.order, "OC, CO or OC-then-CO")->capture_default_str();
    app.add_option("--country", s.country, "Country/Region name in the JHU files")->capture_default_str();
    app.add_option("--from", s.from, "CFR fit window start, YYYY-MM-DD")->capture_default_str();
    app.add_option("--to", s.to, "CFR fit window end, YYYY-MM-DD")->capture_default_str();
    app.add_option("--k-min", s.k_min, "smallest death delay tried")->capture_default_str();
    app.add_option("--k-max", s.k_max, "largest death delay tried")->capture_default_str();
    app.add_option("--oc-start", s.oc_start, "first day of the open-close cycle")->capture_default_str();
    app.add_option("--cycle-days", s.cycle_days, "length of each cycle, days")->capture_default_str();
    o.cfr = app.add_option("--cfr", s.cfr, "use this CFR instead of fitting one (e.g. 0.0085)");
    app.add_flag("--check", s.check, "compare the validation against the published Israel figures");
    app.add_option("--data-dir", s.data_dir, "directory holding the JHU global CSV files")->capture_default_str();
    app.add_option("--until", s.until, "fetch: drop date columns after this day, YYYY-MM-DD");
    app.add_option("--format", s.format, "structured output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", s.out, "write structured output here instead of stdout");

    auto* schedule = app.add_subcommand("schedule", "open/close phase lengths satisfying the average principle");
    auto* simulate = app.add_subcommand("simulate", "daily active-case trajectory of OC, CO or OC-then-CO");
    auto* compare = app.add_subcommand("compare-costs", "AUC costs of OC, CO and constant control");
    auto* fit_cfr = app.add_subcommand("fit-cfr", "fit the delayed geometric death kernel and its CFR");
    auto* ingest = app.add_subcommand("ingest", "parse JHU files into dated daily series");
    auto* validate = app.add_subcommand("validate", "OC vs CO case and death totals on country data");
    auto* fetch = app.add_subcommand("fetch", "download current JHU CSVs (not reproducible)");
    for (auto* sub : {schedule, simulate, compare, fit_cfr, ingest, validate, fetch}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_input;
    }

    try {
        if (*schedule) {
            return run_schedule(s, o);
        }
        if (*simulate) {
            return run_simulate(s, o);
        }
        if (*compare) {
            return run_compare_costs(s, o);
        }
        if (*fit_cfr) {
            return run_fit_cfr(s);
        }
        if (*ingest) {
            return run_ingest(s);
        }
        if (*validate) {
            return run_validate(s, o);
        }
        if (*fetch) {
            return run_fetch(s);
        }
    } catch (const pec::InvalidParameters& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const pec::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_internal;
}
