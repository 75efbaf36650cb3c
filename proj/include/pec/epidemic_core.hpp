#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace pec {

/// Removal rate used when a strategy is given as growth/decay rates and a
/// reproduction number is still needed (1/14 per day).
inline constexpr double default_gamma = 1.0 / 14.0;

/// Net exponential rates of the active-case curve: alpha = gamma (r_open - 1)
/// while open, beta = gamma (1 - r_close) while closed.
struct GrowthRates {
    double alpha;
    double beta;
};

/// Periodic two-phase control strategy in reproduction-number form.
///
/// Invariants (checked by validate()): gamma > 0, r_open > 1,
/// 0 <= r_close < 1, i0 > 0, period > 0.
struct StrategyParams {
    double gamma = default_gamma;
    double r_open = 0.0;
    double r_close = 0.0;
    double i0 = 0.0;
    double period = 0.0;

    /// Builds params from rates; exact inverse of rates(). Requires
    /// beta <= gamma so that r_close stays non-negative.
    static StrategyParams from_rates(GrowthRates rates, double i0, double period,
                                     double gamma = default_gamma);

    GrowthRates rates() const { return {gamma * (r_open - 1.0), gamma * (1.0 - r_close)}; }

    void validate() const;
};

enum class CycleOrder { OC, CO, Custom };

std::string_view to_string(CycleOrder order);

struct Phase {
    double rt;       // reproduction number held during the phase
    double duration; // days

    friend bool operator==(const Phase&, const Phase&) = default;
};

/// Ordered phases of one control cycle. Durations are positive and sum to
/// period(); OC/CO tags additionally require exactly two phases with the
/// growth phase first (OC) or second (CO).
class PhaseSchedule {
public:
    /// Throws InvalidParameters when a duration is non-positive, an rt is
    /// negative, the OC/CO shape is violated, or the durations do not add up
    /// to declared_period (relative 1e-9).
    PhaseSchedule(std::vector<Phase> phases, CycleOrder order,
                  std::optional<double> declared_period = std::nullopt);

    static PhaseSchedule open_close(const StrategyParams& params);
    static PhaseSchedule close_open(const StrategyParams& params);

    const std::vector<Phase>& phases() const noexcept { return phases_; }
    CycleOrder order() const noexcept { return order_; }
    double period() const noexcept { return period_; }

    /// Concatenates two schedules into a single custom cycle.
    PhaseSchedule then(const PhaseSchedule& next) const;

    friend bool operator==(const PhaseSchedule&, const PhaseSchedule&) = default;

private:
    std::vector<Phase> phases_;
    CycleOrder order_;
    double period_;
};

/// One exponential piece of a trajectory: I(t) = start_active * exp(rate (t - start_time)).
struct Segment {
    double start_time;
    double end_time;
    double start_active;
    double rate; // gamma (rt - 1), per day

    double end_active() const;
    double value_at(double t) const;
};

struct BoundaryPoint {
    double time;
    double active;
};

/// Active-case curve sampled on a regular grid, carrying the exact
/// closed-form segments so AUCs downstream need no quadrature.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> active;
    std::vector<Segment> segments;

    /// Exact (time, I) at t = 0, every phase switch and the cycle end.
    std::vector<BoundaryPoint> phase_boundaries() const;

    /// Exact closed-form value at an arbitrary time inside the cycle.
    double value_at(double t) const;
};

struct PhaseLengths {
    double t_open;
    double t_close;
};

/// Open/close durations that make the cycle periodic (mean R_t = 1).
PhaseLengths phase_lengths(const StrategyParams& params);

/// Same split expressed with rates: t_open = beta T / (alpha + beta).
PhaseLengths phase_lengths(GrowthRates rates, double period);

/// Time-average of R_t over the schedule, S_R(T) / T.
double average_rt(const PhaseSchedule& schedule);

Trajectory solve_trajectory(double i0, const PhaseSchedule& schedule, double gamma,
                            double sample_step = 1.0);

/// Reverses a two-phase cycle (OC <-> CO). Throws for any other shape.
PhaseSchedule swap_cycle(const PhaseSchedule& schedule);

} // namespace pec
