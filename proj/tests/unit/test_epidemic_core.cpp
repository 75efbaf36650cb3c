#include <doctest.h>

#include "pec/epidemic_core.hpp"
#include "pec/errors.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace pec;
using pectest::rel_err;

namespace {

StrategyParams rn(double r_open, double r_close, double period, double gamma = 0.1, double i0 = 1000.0)
{
    StrategyParams p;
    p.gamma = gamma;
    p.r_open = r_open;
    p.r_close = r_close;
    p.i0 = i0;
    p.period = period;
    return p;
}

} // namespace

TEST_CASE("phase_lengths examples")
{
    auto sym = phase_lengths(rn(1.5, 0.5, 54));
    CHECK(sym.t_open == doctest::Approx(27).epsilon(1e-14));
    CHECK(sym.t_close == doctest::Approx(27).epsilon(1e-14));

    // total suppression: 2 t_open + 0 t_close = 30 with t_open + t_close = 30
    auto full = phase_lengths(rn(2.0, 0.0, 30));
    CHECK(full.t_open == doctest::Approx(15).epsilon(1e-14));
    CHECK(full.t_close == doctest::Approx(15).epsilon(1e-14));
    CHECK(2.0 * full.t_open + 0.0 * full.t_close == doctest::Approx(30).epsilon(1e-14));

    auto ref = phase_lengths(GrowthRates{0.0410, 0.0553}, 54);
    CHECK(std::abs(ref.t_open - 31.0) < 0.1);
    CHECK(std::abs(ref.t_close - 23.0) < 0.1);
    CHECK(ref.t_open == doctest::Approx(0.0553 * 54 / (0.0410 + 0.0553)));
}

TEST_CASE("phase_lengths rejects schedules that cannot be periodic")
{
    CHECK_THROWS_AS(phase_lengths(rn(1.0, 0.5, 54)), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(rn(0.9, 0.5, 54)), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(rn(1.5, 1.0, 54)), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(rn(1.5, -0.1, 54)), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(rn(1.5, 0.5, 0)), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(rn(1.5, 0.5, 54, 0.0)), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(rn(1.5, 0.5, 54, 0.1, 0.0)), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(GrowthRates{0.0, 0.05}, 54), InvalidParameters);
    CHECK_THROWS_AS(phase_lengths(GrowthRates{0.04, -0.05}, 54), InvalidParameters);
}

TEST_CASE("rate and reproduction-number forms convert exactly")
{
    auto p = StrategyParams::from_rates({0.0410, 0.0553}, 21000, 54);
    CHECK(p.gamma == default_gamma);
    auto r = p.rates();
    CHECK(rel_err(r.alpha, 0.0410) < 1e-14);
    CHECK(rel_err(r.beta, 0.0553) < 1e-14);
    CHECK_THROWS_AS(StrategyParams::from_rates({0.04, 0.2}, 1, 10, 0.1), InvalidParameters);
}

TEST_CASE("average principle holds for random parameters")
{
    pectest::Gen g(11);
    for (int i = 0; i < 2000; ++i) {
        const auto p = g.params();
        const auto pl = phase_lengths(p);
        CHECK(rel_err(p.r_open * pl.t_open + p.r_close * pl.t_close, p.period) <= 1e-12);
        CHECK(rel_err(pl.t_open + pl.t_close, p.period) <= 1e-12);
        CHECK(rel_err(average_rt(PhaseSchedule::open_close(p)), 1.0) <= 1e-12);
    }
}

TEST_CASE("average_rt examples")
{
    CHECK(average_rt(PhaseSchedule({{1.0, 17.5}}, CycleOrder::Custom)) == 1.0);
    CHECK(average_rt(PhaseSchedule({{1.5, 27}, {0.5, 27}}, CycleOrder::OC)) == doctest::Approx(1.0).epsilon(1e-15));
    // rt values backed out of alpha=0.041, beta=0.0553 with gamma=0.1
    const double avg = average_rt(PhaseSchedule({{1.41, 31}, {0.447, 23}}, CycleOrder::OC));
    CHECK(std::abs(avg - 1.0) < 0.01);
    CHECK(avg == doctest::Approx((1.41 * 31 + 0.447 * 23) / 54.0));
}

TEST_CASE("schedule validation")
{
    CHECK_THROWS_AS(PhaseSchedule({}, CycleOrder::Custom), InvalidParameters);
    CHECK_THROWS_AS(PhaseSchedule({{1.5, 0.0}, {0.5, 10}}, CycleOrder::OC), InvalidParameters);
    CHECK_THROWS_AS(PhaseSchedule({{1.5, -1.0}, {0.5, 10}}, CycleOrder::Custom), InvalidParameters);
    CHECK_THROWS_AS(PhaseSchedule({{-0.5, 10}}, CycleOrder::Custom), InvalidParameters);
    CHECK_THROWS_AS(PhaseSchedule({{0.5, 10}, {1.5, 10}}, CycleOrder::OC), InvalidParameters);
    CHECK_THROWS_AS(PhaseSchedule({{1.5, 10}, {0.5, 10}}, CycleOrder::CO), InvalidParameters);
    CHECK_THROWS_AS(PhaseSchedule({{1.5, 10}}, CycleOrder::OC), InvalidParameters);
    CHECK_THROWS_AS(PhaseSchedule({{1.5, 10}, {0.5, 10}}, CycleOrder::OC, 25.0), InvalidParameters);
    CHECK_NOTHROW(PhaseSchedule({{1.5, 10}, {0.5, 10}}, CycleOrder::OC, 20.0));
    CHECK_NOTHROW(PhaseSchedule({{1.5, 10}, {0.0, 10}}, CycleOrder::OC));
}

TEST_CASE("solve_trajectory examples")
{
    SUBCASE("single growth phase matches RK4")
    {
        PhaseSchedule s({{2.0, 10}}, CycleOrder::Custom);
        auto tr = solve_trajectory(1000, s, 0.1);
        CHECK(tr.times.size() == 11);
        CHECK(rel_err(tr.active.back(), 1000 * std::exp(1.0)) < 1e-14);
        CHECK(rel_err(tr.active.back(), pectest::rk4_value(1000, s, 0.1, 10, 0.01)) < 1e-6);
        CHECK(tr.active.back() == doctest::Approx(2718.28).epsilon(1e-6));
    }
    SUBCASE("rt identically one is flat")
    {
        auto tr = solve_trajectory(21000, PhaseSchedule({{1.0, 40}}, CycleOrder::Custom), 0.2);
        for (double v : tr.active) {
            CHECK(v == 21000.0);
        }
    }
    SUBCASE("reference OC cycle")
    {
        auto p = StrategyParams::from_rates({0.0410, 0.0553}, 21000, 54);
        auto tr = solve_trajectory(21000, PhaseSchedule::open_close(p), p.gamma);
        auto peak = std::max_element(tr.active.begin(), tr.active.end()) - tr.active.begin();
        CHECK(tr.times[peak] == 31.0);
        CHECK(std::abs(tr.active[peak] - 75000) < 500);
        CHECK(rel_err(tr.active.back(), 21000) <= 1e-12);
        CHECK(tr.times.back() == 54.0);
    }
    SUBCASE("non-integer period ends on an exact sample")
    {
        auto tr = solve_trajectory(5, PhaseSchedule({{1.3, 2.25}, {0.2, 1.5}}, CycleOrder::OC), 0.3);
        CHECK(tr.times == std::vector<double>{0, 1, 2, 3, 3.75});
        auto b = tr.phase_boundaries();
        REQUIRE(b.size() == 3);
        CHECK(b[1].time == 2.25);
        CHECK(rel_err(b[1].active, 5 * std::exp(0.3 * 0.3 * 2.25)) < 1e-14);
    }
    SUBCASE("bad arguments")
    {
        PhaseSchedule s({{2.0, 10}}, CycleOrder::Custom);
        CHECK_THROWS_AS(solve_trajectory(0, s, 0.1), InvalidParameters);
        CHECK_THROWS_AS(solve_trajectory(1, s, 0.1, 0.0), InvalidParameters);
        CHECK_THROWS_AS(solve_trajectory(1, s, 0.0), InvalidParameters);
    }
}

TEST_CASE("closed form agrees with RK4 on random schedules")
{
    pectest::Gen g(12);
    for (int n = 0; n < 50; ++n) {
        const int phases = g.integer(1, 5);
        std::vector<Phase> ph;
        for (int i = 0; i < phases; ++i) {
            ph.push_back({g.uniform(0.0, 2.5), g.uniform(0.5, 25.0)});
        }
        PhaseSchedule s(ph, CycleOrder::Custom);
        const double gamma = g.uniform(0.03, 0.3);
        const double i0 = g.log_uniform(1, 1e5);
        auto tr = solve_trajectory(i0, s, gamma);
        for (size_t i = 0; i < tr.times.size(); ++i) {
            CHECK(rel_err(tr.active[i], pectest::rk4_value(i0, s, gamma, tr.times[i], 0.01)) <= 1e-6);
        }
    }
}

TEST_CASE("trajectory invariants")
{
    pectest::Gen g(13);
    for (int n = 0; n < 200; ++n) {
        const auto p = g.params();
        for (auto s : {PhaseSchedule::open_close(p), PhaseSchedule::close_open(p)}) {
            auto tr = solve_trajectory(p.i0, s, p.gamma, 0.25);
            CHECK(rel_err(tr.active.back(), p.i0) <= 1e-12);
            for (size_t i = 0; i < tr.times.size(); ++i) {
                CHECK(tr.active[i] > 0);
                if (i > 0) {
                    CHECK(tr.times[i] > tr.times[i - 1]);
                }
            }
            // uniform grid inside each phase: second differences of log I vanish
            for (const auto& seg : tr.segments) {
                const double h = (seg.end_time - seg.start_time) / 8;
                for (int k = 1; k < 8; ++k) {
                    const double t = seg.start_time + k * h;
                    const double d2 = std::log(tr.value_at(t + h)) - 2 * std::log(tr.value_at(t)) +
                                      std::log(tr.value_at(t - h));
                    CHECK(std::abs(d2) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("custom schedules with average one are periodic")
{
    pectest::Gen g(14);
    for (int n = 0; n < 200; ++n) {
        std::vector<Phase> ph;
        double weighted = 0.0;
        double total = 0.0;
        const int k = g.integer(2, 6);
        for (int i = 0; i + 1 < k; ++i) {
            ph.push_back({g.uniform(0.0, 2.0), g.uniform(1.0, 10.0)});
            weighted += ph.back().rt * ph.back().duration;
            total += ph.back().duration;
        }
        // pick the last phase so the mean of R_t is one
        const double dur = g.uniform(1.0, 10.0);
        const double rt = (total + dur - weighted) / dur;
        if (rt < 0) {
            continue;
        }
        ph.push_back({rt, dur});
        PhaseSchedule s(ph, CycleOrder::Custom);
        CHECK(rel_err(average_rt(s), 1.0) < 1e-12);
        auto tr = solve_trajectory(100, s, g.uniform(0.05, 0.3));
        CHECK(rel_err(tr.active.back(), 100) <= 1e-12);
    }
}

TEST_CASE("swap_cycle")
{
    PhaseSchedule oc({{1.5, 31}, {0.2, 23}}, CycleOrder::OC);
    auto co = swap_cycle(oc);
    CHECK(co.order() == CycleOrder::CO);
    CHECK(co.phases()[0] == Phase{0.2, 23});
    CHECK(co.phases()[1] == Phase{1.5, 31});
    CHECK(swap_cycle(co) == oc);
    CHECK(co.period() == oc.period());

    pectest::Gen g(15);
    for (int n = 0; n < 500; ++n) {
        auto s = PhaseSchedule::open_close(g.params());
        auto w = swap_cycle(s);
        CHECK(swap_cycle(w) == s);
        CHECK(w.period() == s.period());
        auto a = s.phases();
        auto b = w.phases();
        std::sort(a.begin(), a.end(), [](auto x, auto y) { return x.rt < y.rt; });
        std::sort(b.begin(), b.end(), [](auto x, auto y) { return x.rt < y.rt; });
        CHECK(a == b);
    }

    CHECK_THROWS_AS(swap_cycle(PhaseSchedule({{1.5, 1}}, CycleOrder::Custom)), InvalidParameters);
    CHECK_THROWS_AS(swap_cycle(PhaseSchedule({{1.5, 1}, {0.5, 1}, {1, 1}}, CycleOrder::Custom)),
                    InvalidParameters);
}

TEST_CASE("OC then CO returns to i0 at both cycle ends")
{
    auto p = StrategyParams::from_rates({0.0410, 0.0553}, 21000, 54);
    auto s = PhaseSchedule::open_close(p).then(PhaseSchedule::close_open(p));
    CHECK(s.order() == CycleOrder::Custom);
    CHECK(s.period() == doctest::Approx(108));
    auto tr = solve_trajectory(p.i0, s, p.gamma);
    CHECK(std::abs(tr.active[54] - 21000) <= 1);
    CHECK(std::abs(tr.active[108] - 21000) <= 1);
    // CO minimum after the close phase
    const double nadir = tr.value_at(54 + phase_lengths(p).t_close);
    CHECK(rel_err(nadir, 21000 * std::exp(-0.0553 * phase_lengths(p).t_close)) < 1e-12);
    CHECK(std::abs(21000 * std::exp(-0.0553 * 23) - 5890) < 10);
}

TEST_CASE("near-degenerate open phase still periodic")
{
    auto p = rn(1.0001, 0.5, 54);
    auto pl = phase_lengths(p);
    CHECK(pl.t_open > 53.98);
    CHECK(rel_err(average_rt(PhaseSchedule::open_close(p)), 1.0) < 1e-12);
}
