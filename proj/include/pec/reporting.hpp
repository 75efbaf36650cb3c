#pragma once

#include "pec/cfr_estimation.hpp"
#include "pec/cost_model.hpp"
#include "pec/data_pipeline.hpp"
#include "pec/epidemic_core.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pec {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Strategy parameters as given on the command line: either reproduction
// numbers (gamma, r_open, r_close) or rates (alpha, beta).

struct StrategyInput {
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<double> r_open;
    std::optional<double> r_close;
    double i0 = 21000.0;
    double period = 54.0;

    StrategyParams resolve() const;
};

enum class SimulationOrder { OC, CO, OCThenCO };

SimulationOrder parse_simulation_order(std::string_view text);
std::string_view to_string(SimulationOrder order);

PhaseSchedule simulation_schedule(const StrategyParams& params, SimulationOrder order);

Json schedule_json(const StrategyParams& params);
Json trajectory_json(const Trajectory& traj, const PhaseSchedule& schedule, double gamma);
std::string trajectory_csv(const Trajectory& traj);
Json compare_costs_json(const StrategyParams& params);

// ---------------------------------------------------------------------------
// Pinned JHU snapshot

struct SnapshotFile {
    std::string name;
    std::filesystem::path path;
    bool exists = false;
    std::uintmax_t size = 0;
    std::string sha256;
    std::optional<std::string> expected_sha256; // from SHA256SUMS, when present

    bool ok() const { return exists && (!expected_sha256 || *expected_sha256 == sha256); }
};

struct SnapshotCheck {
    std::filesystem::path dir;
    bool manifest_found = false;
    std::vector<SnapshotFile> files;

    bool ok() const;
    std::string report() const;
};

inline constexpr const char* confirmed_file = "time_series_covid19_confirmed_global.csv";
inline constexpr const char* deaths_file = "time_series_covid19_deaths_global.csv";
inline constexpr const char* recovered_file = "time_series_covid19_recovered_global.csv";

std::string sha256_file(const std::filesystem::path& file);

SnapshotCheck check_snapshot(const std::filesystem::path& dir);

struct CountryData {
    std::string country;
    DailySeries confirmed;
    DailySeries deaths;
    DailySeries recovered;

    DailySeries new_cases() const { return difference(confirmed); }
    DailySeries daily_deaths() const { return difference(deaths); }
    DailySeries active() const { return active_cases(confirmed, deaths, recovered); }
};

/// Loads the three cumulative series for a country. Throws DataError with the
/// snapshot checksum report when a file is missing or fails its checksum.
CountryData load_country(const std::filesystem::path& dir, std::string_view country);

Json ingest_report_json(const CountryData& data);
std::vector<DailySeries> ingest_series(const CountryData& data);

// ---------------------------------------------------------------------------
// CFR fitting from cumulative data

struct CfrFitOptions {
    Date from = make_date(2020, 6, 1);
    Date to = make_date(2020, 12, 29);
    DelayRange k_range{0, 15};
    int smoothing_days = 7;
};

/// Differences both cumulative series, smooths them with a trailing moving
/// average, restricts them to [from, to] and fits the delay kernel.
CfrModel fit_cfr(const DailySeries& confirmed, const DailySeries& deaths, const CfrFitOptions& options);

Json cfr_model_json(const CfrModel& model);

// ---------------------------------------------------------------------------
// Open-close / close-open validation on country data

struct DateRange {
    Date from;
    Date to;
};

struct ActiveAnchor {
    std::string label;
    Date date;
    double active;
};

struct ValidationOptions {
    Date oc_start = make_date(2020, 8, 30);
    int cycle_days = 54;
    std::optional<double> cfr_override; // e.g. 0.0085 for exact reproduction
    CfrFitOptions cfr_fit;
};

struct ValidationReport {
    DateRange oc_window; // inclusive; cases counted between the anchor dates
    DateRange co_window;
    double oc_cases = 0.0;
    double co_cases = 0.0;
    double cfr_used = 0.0;
    bool cfr_fitted = false;
    std::optional<CfrModel> cfr_model;
    double oc_deaths_est = 0.0;
    double co_deaths_est = 0.0;
    double death_ratio = 0.0;
    double predicted_ratio_from_model = 0.0;
    std::vector<ActiveAnchor> anchors; // start, OC peak, CO nadir, end
};

ValidationReport validate(const CountryData& data, const ValidationOptions& options = {});

Json validation_json(const ValidationReport& report);

struct ReferenceCheck {
    std::string name;
    double value;
    double expected;
    double tolerance; // absolute
    bool pass;
};

/// Comparison with the published Israel figures (case totals +-3%, deaths
/// +-5%, ratios +-0.2, anchor active counts exact).
std::vector<ReferenceCheck> check_israel_reference(const ValidationReport& report);

} // namespace pec
