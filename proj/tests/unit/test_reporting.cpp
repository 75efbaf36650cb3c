#include <doctest.h>

#include "pec/errors.hpp"
#include "pec/reporting.hpp"
#include "support.hpp"

#include <fstream>
#include <sstream>

using namespace pec;
using pectest::rel_err;

namespace {

const std::filesystem::path fixture_dir = std::filesystem::path(PEC_FIXTURE_DIR) / "jhu";

std::filesystem::path scratch_copy(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("pec_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (const auto& e : std::filesystem::directory_iterator(fixture_dir)) {
        std::filesystem::copy_file(e.path(), dir / e.path().filename());
    }
    return dir;
}

} // namespace

TEST_CASE("strategy input resolution")
{
    StrategyInput none;
    auto p = none.resolve();
    CHECK(rel_err(p.rates().alpha, 0.0410) < 1e-14);
    CHECK(rel_err(p.rates().beta, 0.0553) < 1e-14);
    CHECK(p.i0 == 21000);
    CHECK(p.period == 54);

    StrategyInput rts;
    rts.r_open = 1.5;
    rts.r_close = 0.5;
    rts.gamma = 0.1;
    auto q = rts.resolve();
    CHECK(q.r_open == 1.5);
    CHECK(q.gamma == 0.1);

    StrategyInput both = rts;
    both.alpha = 0.04;
    CHECK_THROWS_AS(both.resolve(), InvalidParameters);
    StrategyInput half;
    half.alpha = 0.04;
    CHECK_THROWS_AS(half.resolve(), InvalidParameters);
    StrategyInput half_rt;
    half_rt.r_open = 1.2;
    CHECK_THROWS_AS(half_rt.resolve(), InvalidParameters);
    StrategyInput bad = rts;
    bad.r_close = 1.2;
    CHECK_THROWS_AS(bad.resolve(), InvalidParameters);
}

TEST_CASE("simulation orders")
{
    CHECK(parse_simulation_order("OC") == SimulationOrder::OC);
    CHECK(parse_simulation_order("co") == SimulationOrder::CO);
    CHECK(parse_simulation_order("OC-then-CO") == SimulationOrder::OCThenCO);
    CHECK_THROWS_AS(parse_simulation_order("sideways"), InvalidParameters);
    auto p = StrategyInput{}.resolve();
    CHECK(simulation_schedule(p, SimulationOrder::OCThenCO).period() == doctest::Approx(108));
    CHECK(simulation_schedule(p, SimulationOrder::CO).order() == CycleOrder::CO);
}

TEST_CASE("schedule output")
{
    StrategyInput in;
    in.r_open = 1.5;
    in.r_close = 0.5;
    auto j = schedule_json(in.resolve());
    CHECK(j["t_open"].get<double>() == doctest::Approx(27));
    CHECK(j["t_close"].get<double>() == doctest::Approx(27));
    CHECK(j["average_rt"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j["oc_phases"].size() == 2);
}

TEST_CASE("cost table is internally consistent")
{
    pectest::Gen g(51);
    for (int i = 0; i < 200; ++i) {
        auto p = g.params();
        auto j = compare_costs_json(p);
        const double alpha = p.rates().alpha;
        const double k = std::exp(alpha * phase_lengths(p).t_open);
        CHECK(rel_err(j["ratio"].get<double>(), k) <= 1e-12);
        CHECK(rel_err(j["i_max_over_i0"].get<double>(), k) <= 1e-12);
        CHECK(rel_err(j["c_oc"].get<double>() / j["c_co"].get<double>(), k) <= 1e-12);
        CHECK(j["c_co"].get<double>() < j["c_const"].get<double>());
        CHECK(j["c_const"].get<double>() < j["c_oc"].get<double>());
        CHECK(rel_err(j["new_cases_oc"].get<double>(), p.gamma * j["c_oc"].get<double>()) < 1e-14);
    }
}

TEST_CASE("trajectory csv")
{
    auto p = StrategyInput{}.resolve();
    auto s = simulation_schedule(p, SimulationOrder::OCThenCO);
    auto csv = trajectory_csv(solve_trajectory(p.i0, s, p.gamma));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,active");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 109);
}

TEST_CASE("fixture snapshot loads and verifies")
{
    auto check = check_snapshot(fixture_dir);
    CHECK(check.manifest_found);
    CHECK(check.ok());
    auto data = load_country(fixture_dir, "Testland");
    CHECK(data.confirmed.start_date() == make_date(2020, 1, 22));
    CHECK(data.confirmed.end_date() == make_date(2020, 12, 31));
    CHECK(data.confirmed.at(make_date(2020, 5, 31)) == 0);
    auto other = load_country(fixture_dir, "Other, Republic of");
    CHECK(other.confirmed.values()[1] == 1);
}

TEST_CASE("corrupt or incomplete snapshots are rejected with a checksum report")
{
    auto dir = scratch_copy("corrupt");
    {
        std::ofstream f(dir / deaths_file, std::ios::app);
        f << "\n";
    }
    auto check = check_snapshot(dir);
    CHECK_FALSE(check.ok());
    try {
        load_country(dir, "Testland");
        FAIL("expected an error");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(deaths_file) != std::string::npos);
        CHECK(msg.find("FAILED") != std::string::npos);
    }
    std::filesystem::remove(dir / recovered_file);
    CHECK_THROWS_AS(load_country(dir, "Testland"), DataError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sha256 of a known string")
{
    auto path = std::filesystem::temp_directory_path() / "pec_sha_abc.txt";
    std::ofstream(path, std::ios::binary) << "abc";
    CHECK(sha256_file(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::filesystem::remove(path);
}

TEST_CASE("fit on the synthetic fixture recovers its generator")
{
    auto data = load_country(fixture_dir, "Testland");
    auto m = fit_cfr(data.confirmed, data.deaths, CfrFitOptions{});
    CHECK(m.kernel.delay_k == 3);
    CHECK(std::abs(m.kernel.decay_a - 0.943) <= 1e-6);
    CHECK(std::abs(m.kernel.scale_b - 0.000485) <= 1e-6);
    CHECK(std::abs(m.cfr - 0.000485 / 0.057) <= 1e-6);
    CHECK(m.num_points == 212);

    CfrFitOptions late;
    late.k_range = {5, 15};
    auto worse = fit_cfr(data.confirmed, data.deaths, late);
    CHECK(worse.sse > m.sse);
    auto j = cfr_model_json(m);
    CHECK(j["k_search"].size() == 16);
    CHECK(j["fitted_deaths"].size() == 212);
}

TEST_CASE("validation arithmetic on the fixture")
{
    auto data = load_country(fixture_dir, "Testland");
    auto r = validate(data);
    CHECK(r.oc_window.from == make_date(2020, 8, 30));
    CHECK(r.oc_window.to == make_date(2020, 10, 22));
    CHECK(r.co_window.from == make_date(2020, 10, 23));
    CHECK(r.co_window.to == make_date(2020, 12, 16));
    CHECK(r.oc_cases == data.confirmed.at(make_date(2020, 10, 23)) - data.confirmed.at(make_date(2020, 8, 30)));
    CHECK(r.co_cases == data.confirmed.at(make_date(2020, 12, 16)) - data.confirmed.at(make_date(2020, 10, 23)));
    CHECK(r.cfr_fitted);
    CHECK(r.oc_deaths_est == r.oc_cases * r.cfr_used);
    CHECK(r.co_deaths_est == r.co_cases * r.cfr_used);
    CHECK(r.death_ratio == r.oc_cases / r.co_cases);
    REQUIRE(r.anchors.size() == 4);
    const auto active = data.active();
    CHECK(r.anchors[0].active == active.at(make_date(2020, 8, 30)));
    CHECK(r.anchors[3].active == active.at(make_date(2020, 12, 16)));
    CHECK(r.predicted_ratio_from_model == r.anchors[1].active / r.anchors[0].active);
    for (Date d = r.oc_window.from; d <= make_date(2020, 10, 23); d = add_days(d, 1)) {
        CHECK(active.at(d) <= r.anchors[1].active);
    }

    ValidationOptions fixed;
    fixed.cfr_override = 0.0085;
    auto o = validate(data, fixed);
    CHECK_FALSE(o.cfr_fitted);
    CHECK(o.cfr_used == 0.0085);
    CHECK(o.oc_deaths_est == o.oc_cases * 0.0085);
    auto j = validation_json(o);
    CHECK(j["cfr_source"] == "override");
    CHECK_FALSE(j.contains("cfr_model"));

    auto checks = check_israel_reference(o);
    CHECK(checks.size() == 10);
}

TEST_CASE("ingested series round trip through the long format")
{
    auto data = load_country(fixture_dir, "Testland");
    auto series = ingest_series(data);
    CHECK(series.size() == 6);
    std::ostringstream csv;
    write_long_csv(csv, series);
    std::istringstream in(csv.str());
    auto back = read_long_csv(in);
    auto from_json = read_long_json(to_long_json(series));
    CHECK(back == from_json);
    for (const auto& s : series) {
        bool found = false;
        for (const auto& b : back) {
            if (b.kind() == s.kind()) {
                CHECK(b == s);
                found = true;
            }
        }
        CHECK(found);
    }
    auto report = ingest_report_json(data);
    CHECK(report["series"].size() == 6);
}
