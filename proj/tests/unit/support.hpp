#pragma once

#include "pec/epidemic_core.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace pectest {

inline double rel_err(double got, double want)
{
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(unsigned long seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    double normal(double sd) { return std::normal_distribution<double>(0.0, sd)(rng); }

    pec::StrategyParams params()
    {
        pec::StrategyParams p;
        p.gamma = uniform(0.03, 0.5);
        p.r_open = uniform(1.05, 3.0);
        p.r_close = uniform(0.0, 0.95);
        p.i0 = log_uniform(1.0, 1e6);
        p.period = uniform(5.0, 120.0);
        return p;
    }

    pec::GrowthRates rates()
    {
        return {log_uniform(1e-3, 0.3), log_uniform(1e-3, 0.3)};
    }
};

// Fixed-step RK4 for dI/dt = gamma (R_t - 1) I. The step is shortened to land
// exactly on every phase switch so R_t is constant inside each step.
inline double rk4_value(double i0, const pec::PhaseSchedule& s, double gamma, double t_end, double h)
{
    double t = 0.0;
    double y = i0;
    double phase_start = 0.0;
    for (const auto& ph : s.phases()) {
        const double phase_end = std::min(phase_start + ph.duration, t_end);
        const double k = gamma * (ph.rt - 1.0);
        while (t < phase_end - 1e-12) {
            const double step = std::min(h, phase_end - t);
            const double k1 = k * y;
            const double k2 = k * (y + 0.5 * step * k1);
            const double k3 = k * (y + 0.5 * step * k2);
            const double k4 = k * (y + step * k3);
            y += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            t += step;
        }
        phase_start += ph.duration;
        if (phase_start >= t_end) {
            break;
        }
    }
    return y;
}

} // namespace pectest
