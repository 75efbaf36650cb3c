#include "pec/epidemic_core.hpp"

#include "pec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pec {

StrategyParams StrategyParams::from_rates(GrowthRates rates, double i0, double period, double gamma)
{
    if (!(gamma > 0.0)) {
        throw InvalidParameters("gamma must be positive");
    }
    if (!(rates.alpha > 0.0) || !(rates.beta > 0.0)) {
        throw InvalidParameters("alpha and beta must be positive");
    }
    if (rates.beta > gamma) {
        throw InvalidParameters("beta = " + std::to_string(rates.beta) + " exceeds gamma = " +
                                std::to_string(gamma) + ": r_close would be negative");
    }
    StrategyParams p;
    p.gamma = gamma;
    p.r_open = 1.0 + rates.alpha / gamma;
    p.r_close = 1.0 - rates.beta / gamma;
    p.i0 = i0;
    p.period = period;
    p.validate();
    return p;
}

void StrategyParams::validate() const
{
    if (!(gamma > 0.0)) {
        throw InvalidParameters("gamma must be positive");
    }
    if (!(r_open > 1.0)) {
        throw InvalidParameters("r_open must exceed 1, no periodic schedule exists otherwise");
    }
    if (!(r_close >= 0.0)) {
        throw InvalidParameters("r_close must be non-negative");
    }
    if (!(r_close < 1.0)) {
        throw InvalidParameters("r_close must be below 1, no periodic schedule exists otherwise");
    }
    if (!(i0 > 0.0)) {
        throw InvalidParameters("i0 must be positive");
    }
    if (!(period > 0.0)) {
        throw InvalidParameters("period must be positive");
    }
}

std::string_view to_string(CycleOrder order)
{
    switch (order) {
    case CycleOrder::OC:
        return "OC";
    case CycleOrder::CO:
        return "CO";
    case CycleOrder::Custom:
        break;
    }
    return "CUSTOM";
}

PhaseSchedule::PhaseSchedule(std::vector<Phase> phases, CycleOrder order,
                             std::optional<double> declared_period)
    : phases_(std::move(phases)), order_(order), period_(0.0)
{
    if (phases_.empty()) {
        throw InvalidParameters("schedule has no phases");
    }
    for (const auto& ph : phases_) {
        if (!(ph.duration > 0.0) || !std::isfinite(ph.duration)) {
            throw InvalidParameters("phase durations must be positive and finite");
        }
        if (!(ph.rt >= 0.0) || !std::isfinite(ph.rt)) {
            throw InvalidParameters("reproduction numbers must be non-negative and finite");
        }
        period_ += ph.duration;
    }
    if (order_ != CycleOrder::Custom) {
        if (phases_.size() != 2) {
            throw InvalidParameters("OC/CO schedules have exactly two phases");
        }
        const auto& first = phases_[0];
        const auto& second = phases_[1];
        bool ok = order_ == CycleOrder::OC ? (first.rt > 1.0 && second.rt < 1.0)
                                           : (first.rt < 1.0 && second.rt > 1.0);
        if (!ok) {
            throw InvalidParameters(std::string(to_string(order_)) +
                                    " schedule has phases in the wrong order");
        }
    }
    if (declared_period) {
        if (std::abs(period_ - *declared_period) > 1e-9 * std::abs(*declared_period)) {
            throw InvalidParameters("phase durations sum to " + std::to_string(period_) +
                                    ", declared period is " + std::to_string(*declared_period));
        }
    }
}

PhaseSchedule PhaseSchedule::open_close(const StrategyParams& params)
{
    auto len = phase_lengths(params);
    return PhaseSchedule({{params.r_open, len.t_open}, {params.r_close, len.t_close}}, CycleOrder::OC,
                         params.period);
}

PhaseSchedule PhaseSchedule::close_open(const StrategyParams& params)
{
    return swap_cycle(open_close(params));
}

PhaseSchedule PhaseSchedule::then(const PhaseSchedule& next) const
{
    auto all = phases_;
    all.insert(all.end(), next.phases_.begin(), next.phases_.end());
    return PhaseSchedule(std::move(all), CycleOrder::Custom);
}

double Segment::end_active() const
{
    return value_at(end_time);
}

double Segment::value_at(double t) const
{
    return start_active * std::exp(rate * (t - start_time));
}

std::vector<BoundaryPoint> Trajectory::phase_boundaries() const
{
    std::vector<BoundaryPoint> out;
    if (segments.empty()) {
        return out;
    }
    out.reserve(segments.size() + 1);
    for (const auto& seg : segments) {
        out.push_back({seg.start_time, seg.start_active});
    }
    const auto& last = segments.back();
    out.push_back({last.end_time, last.end_active()});
    return out;
}

double Trajectory::value_at(double t) const
{
    if (segments.empty()) {
        throw InvalidParameters("trajectory has no closed-form segments");
    }
    // First segment whose end lies beyond t; the final segment owns the cycle end.
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double x, const Segment& s) { return x < s.end_time; });
    if (it == segments.end()) {
        --it;
    }
    return it->value_at(t);
}

PhaseLengths phase_lengths(const StrategyParams& params)
{
    params.validate();
    const double span = params.r_open - params.r_close;
    return {(1.0 - params.r_close) / span * params.period, (params.r_open - 1.0) / span * params.period};
}

PhaseLengths phase_lengths(GrowthRates rates, double period)
{
    if (!(rates.alpha > 0.0) || !(rates.beta > 0.0)) {
        throw InvalidParameters("alpha and beta must be positive, no periodic schedule exists otherwise");
    }
    if (!(period > 0.0)) {
        throw InvalidParameters("period must be positive");
    }
    const double sum = rates.alpha + rates.beta;
    return {rates.beta * period / sum, rates.alpha * period / sum};
}

double average_rt(const PhaseSchedule& schedule)
{
    double area = 0.0;
    for (const auto& ph : schedule.phases()) {
        area += ph.rt * ph.duration;
    }
    return area / schedule.period();
}

Trajectory solve_trajectory(double i0, const PhaseSchedule& schedule, double gamma, double sample_step)
{
    if (!(i0 > 0.0)) {
        throw InvalidParameters("i0 must be positive");
    }
    if (!(gamma > 0.0)) {
        throw InvalidParameters("gamma must be positive");
    }
    if (!(sample_step > 0.0)) {
        throw InvalidParameters("sample_step must be positive");
    }

    Trajectory traj;
    traj.segments.reserve(schedule.phases().size());

    // Boundary values come from the accumulated exponent gamma (S_R(t) - t),
    // never from chaining segment end values.
    double t = 0.0;
    double log_growth = 0.0;
    for (const auto& ph : schedule.phases()) {
        const double rate = gamma * (ph.rt - 1.0);
        traj.segments.push_back({t, t + ph.duration, i0 * std::exp(log_growth), rate});
        t += ph.duration;
        log_growth += rate * ph.duration;
    }
    traj.segments.back().end_time = schedule.period();

    const double end = schedule.period();
    const auto n = static_cast<long>(std::floor(end / sample_step + 1e-9));
    traj.times.reserve(static_cast<size_t>(n) + 2);
    for (long k = 0; k <= n; ++k) {
        traj.times.push_back(std::min(static_cast<double>(k) * sample_step, end));
    }
    if (end - traj.times.back() > 1e-9 * end) {
        traj.times.push_back(end);
    }

    traj.active.reserve(traj.times.size());
    for (double ti : traj.times) {
        traj.active.push_back(traj.value_at(ti));
    }
    // The cycle end takes the exact accumulated value.
    if (traj.times.back() == end) {
        traj.active.back() = i0 * std::exp(log_growth);
    }
    return traj;
}

PhaseSchedule swap_cycle(const PhaseSchedule& schedule)
{
    if (schedule.phases().size() != 2) {
        throw InvalidParameters("swap_cycle requires a two-phase schedule");
    }
    CycleOrder order = CycleOrder::Custom;
    if (schedule.order() == CycleOrder::OC) {
        order = CycleOrder::CO;
    } else if (schedule.order() == CycleOrder::CO) {
        order = CycleOrder::OC;
    }
    const auto& p = schedule.phases();
    return PhaseSchedule({p[1], p[0]}, order, schedule.period());
}

} // namespace pec
