#pragma once

#include "pec/epidemic_core.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pec {

class DailySeries;

enum class StrategyTag { OC, CO, Const, Custom };

std::string_view to_string(StrategyTag tag);

/// Life/healthcare cost of one cycle, measured as the AUC of active cases.
struct CostReport {
    StrategyTag strategy = StrategyTag::Custom;
    double auc_active = 0.0; // person-days
    double i0 = 0.0;
    double i_max = 0.0;
    double period = 0.0;
    std::optional<GrowthRates> rates;            // set for OC/CO reports
    std::optional<double> total_new_cases;       // gamma * auc_active, when gamma is known
    std::optional<double> cost_ratio_vs_co;      // OC reports paired through cost_ratio
};

/// rho = (1/alpha + 1/beta)^-1; alpha * t_open == rho * period.
double harmonic_rate(GrowthRates rates);

/// Periodic open-close cycle: (1/beta + 1/alpha)(e^{alpha T_o} - 1) i0.
CostReport cost_oc(GrowthRates rates, double i0, double period,
                   std::optional<double> gamma = std::nullopt);

/// Periodic close-open cycle: (1/beta + 1/alpha)(1 - e^{-alpha T_o}) i0.
CostReport cost_co(GrowthRates rates, double i0, double period,
                   std::optional<double> gamma = std::nullopt);

/// Constant control holding I(t) = i0 over the period.
CostReport cost_const(double i0, double period, std::optional<double> gamma = std::nullopt);

/// C_oc / C_co. Requires an OC and a CO report built from identical
/// parameters, and cross-checks the result against an independently
/// recomputed e^{alpha T_o} (throws std::logic_error on disagreement).
double cost_ratio(const CostReport& oc, const CostReport& co);

/// AUC of a model trajectory. Uses the exact exponential-segment integrals
/// when the trajectory carries segments, otherwise the trapezoid rule over
/// its samples.
double auc_numeric(const Trajectory& traj);

/// Trapezoid AUC over uniformly spaced samples: half-weight endpoints.
double auc_trapezoid(std::span<const double> values, double step = 1.0);

/// Trapezoid AUC of an empirical daily series (person-days).
double auc_trapezoid(const DailySeries& series);

/// Total new cases over a cycle from the active-case curve.
///
/// periodic == true applies AUC_n = gamma AUC_I. Otherwise the general
/// identity AUC_n = gamma AUC_a + a(T) is used, with the zero-initial-state
/// component a(t) = I(t) - I(0) e^{-gamma t}.
double new_cases_over_window(const Trajectory& traj, double gamma, bool periodic);

/// Same for an empirical active-case series, trapezoid AUC with day step.
double new_cases_over_window(const DailySeries& active, double gamma, bool periodic);

/// Zero-initial-state solution of the balance equation dI/dt = -gamma I + n(t)
/// driven by a piecewise-constant inflow n (value n[j] on [j dt, (j+1) dt)).
struct BalanceResponse {
    std::vector<double> state; // a(j dt), j = 0..n.size(), state[0] == 0
    double auc = 0.0;          // exact integral of a over [0, n.size() dt]
    double inflow = 0.0;       // exact integral of n over the same span
};

BalanceResponse balance_response(std::span<const double> inflow, double gamma, double dt = 1.0);

} // namespace pec
