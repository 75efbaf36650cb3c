#include "pec/cost_model.hpp"

#include "pec/data_pipeline.hpp"
#include "pec/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pec {

namespace {

void check_cost_inputs(GrowthRates rates, double i0, double period)
{
    if (!(rates.alpha > 0.0) || !(rates.beta > 0.0)) {
        throw InvalidParameters("alpha and beta must be positive");
    }
    if (!(i0 > 0.0)) {
        throw InvalidParameters("i0 must be positive");
    }
    if (!(period > 0.0)) {
        throw InvalidParameters("period must be positive");
    }
}

std::optional<double> new_cases_for(double auc, std::optional<double> gamma)
{
    if (!gamma) {
        return std::nullopt;
    }
    if (!(*gamma > 0.0)) {
        throw InvalidParameters("gamma must be positive");
    }
    return *gamma * auc;
}

// Integral of start * exp(rate s) for s in [0, dt].
double exponential_area(double start, double rate, double dt)
{
    if (rate == 0.0) {
        return start * dt;
    }
    return start * std::expm1(rate * dt) / rate;
}

} // namespace

std::string_view to_string(StrategyTag tag)
{
    switch (tag) {
    case StrategyTag::OC:
        return "OC";
    case StrategyTag::CO:
        return "CO";
    case StrategyTag::Const:
        return "CONST";
    case StrategyTag::Custom:
        break;
    }
    return "CUSTOM";
}

double harmonic_rate(GrowthRates rates)
{
    return 1.0 / (1.0 / rates.alpha + 1.0 / rates.beta);
}

CostReport cost_oc(GrowthRates rates, double i0, double period, std::optional<double> gamma)
{
    check_cost_inputs(rates, i0, period);
    const double t_open = phase_lengths(rates, period).t_open;
    const double growth = rates.alpha * t_open;

    CostReport r;
    r.strategy = StrategyTag::OC;
    r.auc_active = (1.0 / rates.beta + 1.0 / rates.alpha) * std::expm1(growth) * i0;
    r.i0 = i0;
    r.i_max = i0 * std::exp(growth);
    r.period = period;
    r.rates = rates;
    r.total_new_cases = new_cases_for(r.auc_active, gamma);
    return r;
}

CostReport cost_co(GrowthRates rates, double i0, double period, std::optional<double> gamma)
{
    check_cost_inputs(rates, i0, period);
    const double t_open = phase_lengths(rates, period).t_open;
    const double growth = rates.alpha * t_open;

    CostReport r;
    r.strategy = StrategyTag::CO;
    r.auc_active = (1.0 / rates.beta + 1.0 / rates.alpha) * -std::expm1(-growth) * i0;
    r.i0 = i0;
    r.i_max = i0; // reached at t = 0 and again at t = T
    r.period = period;
    r.rates = rates;
    r.total_new_cases = new_cases_for(r.auc_active, gamma);
    return r;
}

CostReport cost_const(double i0, double period, std::optional<double> gamma)
{
    if (!(i0 > 0.0)) {
        throw InvalidParameters("i0 must be positive");
    }
    if (!(period > 0.0)) {
        throw InvalidParameters("period must be positive");
    }
    CostReport r;
    r.strategy = StrategyTag::Const;
    r.auc_active = i0 * period;
    r.i0 = i0;
    r.i_max = i0;
    r.period = period;
    r.total_new_cases = new_cases_for(r.auc_active, gamma);
    return r;
}

double cost_ratio(const CostReport& oc, const CostReport& co)
{
    if (oc.strategy != StrategyTag::OC || co.strategy != StrategyTag::CO) {
        throw InvalidParameters("cost_ratio expects an OC report and a CO report");
    }
    if (!oc.rates || !co.rates || oc.rates->alpha != co.rates->alpha ||
        oc.rates->beta != co.rates->beta || oc.i0 != co.i0 || oc.period != co.period) {
        throw InvalidParameters("cost_ratio: reports were computed from different parameters");
    }
    const double ratio = oc.auc_active / co.auc_active;

    const auto rates = *oc.rates;
    const double t_open = rates.beta * oc.period / (rates.alpha + rates.beta);
    const double expected = std::exp(rates.alpha * t_open);
    if (std::abs(ratio - expected) > 1e-11 * expected) {
        throw std::logic_error("cost_ratio: C_oc/C_co = " + std::to_string(ratio) +
                               " disagrees with exp(alpha T_o) = " + std::to_string(expected));
    }
    const double peak_ratio = oc.i_max / oc.i0;
    if (std::abs(peak_ratio - expected) > 1e-11 * expected) {
        throw std::logic_error("cost_ratio: I_max/I_0 disagrees with exp(alpha T_o)");
    }
    return ratio;
}

double auc_trapezoid(std::span<const double> values, double step)
{
    if (values.size() < 2) {
        throw DataError("AUC needs at least two samples");
    }
    double inner = 0.0;
    for (size_t i = 1; i + 1 < values.size(); ++i) {
        inner += values[i];
    }
    return step * (0.5 * values.front() + inner + 0.5 * values.back());
}

double auc_trapezoid(const DailySeries& series)
{
    return auc_trapezoid(series.values(), 1.0);
}

double auc_numeric(const Trajectory& traj)
{
    if (traj.segments.empty()) {
        if (traj.times.size() < 2 || traj.times.size() != traj.active.size()) {
            throw DataError("AUC needs at least two samples");
        }
        double area = 0.0;
        for (size_t i = 1; i < traj.times.size(); ++i) {
            area += 0.5 * (traj.active[i] + traj.active[i - 1]) * (traj.times[i] - traj.times[i - 1]);
        }
        return area;
    }
    double area = 0.0;
    for (const auto& seg : traj.segments) {
        area += exponential_area(seg.start_active, seg.rate, seg.end_time - seg.start_time);
    }
    return area;
}

double new_cases_over_window(const Trajectory& traj, double gamma, bool periodic)
{
    if (!(gamma > 0.0)) {
        throw InvalidParameters("gamma must be positive");
    }
    const double auc_active = auc_numeric(traj);
    if (periodic) {
        return gamma * auc_active;
    }
    double i_start = 0.0;
    double i_end = 0.0;
    double span = 0.0;
    if (!traj.segments.empty()) {
        const auto bounds = traj.phase_boundaries();
        i_start = bounds.front().active;
        i_end = bounds.back().active;
        span = bounds.back().time - bounds.front().time;
    } else {
        i_start = traj.active.front();
        i_end = traj.active.back();
        span = traj.times.back() - traj.times.front();
    }
    // a(t) = I(t) - I(0) e^{-gamma t}
    const double free_decay_area = i_start * -std::expm1(-gamma * span) / gamma;
    const double auc_zero_state = auc_active - free_decay_area;
    const double terminal = i_end - i_start * std::exp(-gamma * span);
    return gamma * auc_zero_state + terminal;
}

double new_cases_over_window(const DailySeries& active, double gamma, bool periodic)
{
    Trajectory traj;
    traj.active = active.values();
    traj.times.resize(traj.active.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
        traj.times[i] = static_cast<double>(i);
    }
    return new_cases_over_window(traj, gamma, periodic);
}

BalanceResponse balance_response(std::span<const double> inflow, double gamma, double dt)
{
    if (!(gamma > 0.0)) {
        throw InvalidParameters("gamma must be positive");
    }
    if (!(dt > 0.0)) {
        throw InvalidParameters("dt must be positive");
    }
    const double decay = std::exp(-gamma * dt);
    const double gain = -std::expm1(-gamma * dt) / gamma; // integral of e^{-gamma s} over [0, dt]

    BalanceResponse out;
    out.state.reserve(inflow.size() + 1);
    out.state.push_back(0.0);
    double a = 0.0;
    for (double n : inflow) {
        out.auc += a * gain + n / gamma * (dt - gain);
        out.inflow += n * dt;
        a = a * decay + n * gain;
        out.state.push_back(a);
    }
    return out;
}

} // namespace pec
