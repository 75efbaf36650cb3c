#pragma once

#include "pec/data_pipeline.hpp"

#include <optional>
#include <span>
#include <vector>

namespace pec {

/// Delay kernel w(i) = 0 for i < k, b a^(i-k) for i >= k.
struct DeathKernel {
    int delay_k = 0;
    double decay_a = 0.0;
    double scale_b = 0.0;

    double weight(int i) const;
};

struct KSearchEntry {
    int delay_k;
    double decay_a;
    double scale_b;
    double sse;
};

struct CfrModel {
    DeathKernel kernel;
    double cfr = 0.0;                // b / (1 - a)
    std::optional<double> cv_a;      // percent; empty when the Gram matrix is singular
    std::optional<double> cv_b;      // percent
    double sse = 0.0;                // squared deaths
    size_t num_points = 0;
    DailySeries fitted_deaths{Date{}, {}, SeriesKind::DailyDeaths};
    std::vector<KSearchEntry> k_search; // best (a, b, SSE) for every delay tried
};

struct DelayRange {
    int k_min = 0;
    int k_max = 15;
};

/// CFR = sum of kernel weights = b / (1 - a). Rejects a outside [0, 1) and b < 0.
double cfr_from_params(double decay_a, double scale_b);

/// Kernel prediction via the state recursion s(t) = a s(t-1) + n(t-k),
/// d(t) = b s(t), with s = 0 before the first datum. Same start date as the
/// input; empty when the series is shorter than k.
DailySeries predict_deaths(const DeathKernel& kernel, const DailySeries& new_cases);
std::vector<double> predict_deaths(const DeathKernel& kernel, std::span<const double> new_cases);

struct ParameterCvs {
    std::optional<double> cv_a;
    std::optional<double> cv_b;
    std::optional<double> stderr_a;
    std::optional<double> stderr_b;
};

/// Linearised uncertainty at an optimum: residual variance times the inverse
/// Gram matrix of the Jacobian of the prediction with respect to (a, b).
ParameterCvs parameter_cvs(const DeathKernel& kernel, std::span<const double> new_cases,
                           std::span<const double> deaths);

/// Least-squares fit of (a, b) for every delay in range, keeping the delay
/// with the smallest SSE (smallest k on ties). The two series are aligned on
/// their common dates.
CfrModel fit(const DailySeries& new_cases, const DailySeries& deaths, DelayRange k_range = {},
             size_t min_points = 60);

} // namespace pec
