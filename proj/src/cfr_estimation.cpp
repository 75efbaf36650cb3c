#include "pec/cfr_estimation.hpp"

#include "pec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pec {

namespace {

constexpr int grid_points = 50;
constexpr double a_upper = 1.0 - 1e-9;
constexpr double golden_tol = 1e-12;
constexpr double tie_rel = 1e-12;

// State s(t) of the kernel recursion for decay a and delay k.
void kernel_state(std::span<const double> n, int k, double a, std::vector<double>& s)
{
    s.assign(n.size(), 0.0);
    double state = 0.0;
    const auto delay = static_cast<size_t>(k);
    for (size_t t = 0; t < n.size(); ++t) {
        const double input = t >= delay ? n[t - delay] : 0.0;
        state = a * state + input;
        s[t] = state;
    }
}

struct LinearFit {
    double a;
    double b;
    double sse;
};

class DelayObjective {
public:
    DelayObjective(std::span<const double> n, std::span<const double> d, int k) : n_(n), d_(d), k_(k) {}

    // Closed-form non-negative b for fixed a, and the resulting SSE.
    LinearFit operator()(double a)
    {
        kernel_state(n_, k_, a, s_);
        double ss = 0.0;
        double sd = 0.0;
        for (size_t t = 0; t < s_.size(); ++t) {
            ss += s_[t] * s_[t];
            sd += s_[t] * d_[t];
        }
        const double b = ss > 0.0 ? std::max(0.0, sd / ss) : 0.0;
        double sse = 0.0;
        for (size_t t = 0; t < s_.size(); ++t) {
            const double r = d_[t] - b * s_[t];
            sse += r * r;
        }
        return {a, b, sse};
    }

private:
    std::span<const double> n_;
    std::span<const double> d_;
    int k_;
    std::vector<double> s_;
};

LinearFit fit_delay(std::span<const double> n, std::span<const double> d, int k)
{
    DelayObjective objective(n, d, k);

    // Coarse pre-scan brackets the minimum; golden-section refines inside it.
    std::vector<LinearFit> grid;
    grid.reserve(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        grid.push_back(objective(static_cast<double>(i) / grid_points));
    }
    size_t best_i = 0;
    for (size_t i = 1; i < grid.size(); ++i) {
        if (grid[i].sse < grid[best_i].sse) {
            best_i = i;
        }
    }
    LinearFit best = grid[best_i];

    double lo = best_i == 0 ? 0.0 : grid[best_i - 1].a;
    double hi = best_i + 1 < grid.size() ? grid[best_i + 1].a : a_upper;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    LinearFit f1 = objective(x1);
    LinearFit f2 = objective(x2);
    while (hi - lo > golden_tol) {
        if (f1.sse <= f2.sse) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    for (const auto& f : {f1, f2}) {
        if (f.sse < best.sse) {
            best = f;
        }
    }
    return best;
}

} // namespace

double DeathKernel::weight(int i) const
{
    if (i < delay_k) {
        return 0.0;
    }
    return scale_b * std::pow(decay_a, i - delay_k);
}

double cfr_from_params(double decay_a, double scale_b)
{
    if (!(decay_a < 1.0)) {
        throw InvalidParameters("decay a >= 1: kernel weights do not sum to a finite CFR");
    }
    if (!(decay_a >= 0.0)) {
        throw InvalidParameters("decay a must be non-negative");
    }
    if (!(scale_b >= 0.0)) {
        throw InvalidParameters("scale b must be non-negative");
    }
    return scale_b / (1.0 - decay_a);
}

std::vector<double> predict_deaths(const DeathKernel& kernel, std::span<const double> new_cases)
{
    if (kernel.delay_k < 0) {
        throw InvalidParameters("delay k must be non-negative");
    }
    if (new_cases.size() < static_cast<size_t>(kernel.delay_k)) {
        return {};
    }
    std::vector<double> s;
    kernel_state(new_cases, kernel.delay_k, kernel.decay_a, s);
    for (auto& v : s) {
        v *= kernel.scale_b;
    }
    return s;
}

DailySeries predict_deaths(const DeathKernel& kernel, const DailySeries& new_cases)
{
    return {new_cases.start_date(), predict_deaths(kernel, std::span<const double>(new_cases.values())),
            SeriesKind::DailyDeaths};
}

ParameterCvs parameter_cvs(const DeathKernel& kernel, std::span<const double> new_cases,
                           std::span<const double> deaths)
{
    ParameterCvs out;
    const size_t n = std::min(new_cases.size(), deaths.size());
    if (n <= 2) {
        return out;
    }
    std::vector<double> s;
    kernel_state(new_cases.first(n), kernel.delay_k, kernel.decay_a, s);

    // ds/da follows g(t) = s(t-1) + a g(t-1).
    double g = 0.0;
    double prev_s = 0.0;
    double j_aa = 0.0;
    double j_ab = 0.0;
    double j_bb = 0.0;
    double sse = 0.0;
    for (size_t t = 0; t < n; ++t) {
        g = prev_s + kernel.decay_a * g;
        prev_s = s[t];
        const double da = kernel.scale_b * g;
        const double db = s[t];
        j_aa += da * da;
        j_ab += da * db;
        j_bb += db * db;
        const double r = deaths[t] - kernel.scale_b * s[t];
        sse += r * r;
    }
    const double det = j_aa * j_bb - j_ab * j_ab;
    if (!(det > 1e-12 * j_aa * j_bb) || !std::isfinite(det)) {
        return out;
    }
    const double sigma2 = sse / static_cast<double>(n - 2);
    const double var_a = sigma2 * j_bb / det;
    const double var_b = sigma2 * j_aa / det;
    out.stderr_a = std::sqrt(var_a);
    out.stderr_b = std::sqrt(var_b);
    if (kernel.decay_a != 0.0) {
        out.cv_a = 100.0 * *out.stderr_a / std::abs(kernel.decay_a);
    }
    if (kernel.scale_b != 0.0) {
        out.cv_b = 100.0 * *out.stderr_b / std::abs(kernel.scale_b);
    }
    return out;
}

CfrModel fit(const DailySeries& new_cases, const DailySeries& deaths, DelayRange k_range, size_t min_points)
{
    if (k_range.k_min < 0 || k_range.k_max < k_range.k_min) {
        throw InvalidParameters("invalid delay range [" + std::to_string(k_range.k_min) + ", " +
                                std::to_string(k_range.k_max) + "]");
    }
    auto [cases, dead] = align(new_cases, deaths);
    const auto& n = cases.values();
    const auto& d = dead.values();
    if (n.size() < min_points) {
        throw DataError("fit needs at least " + std::to_string(min_points) + " aligned points, got " +
                        std::to_string(n.size()));
    }
    if (static_cast<size_t>(k_range.k_max) >= n.size()) {
        throw InvalidParameters("delay range exceeds the series length");
    }
    if (std::all_of(n.begin(), n.end(), [](double v) { return v == 0.0; })) {
        throw DataError("new-case series is identically zero");
    }
    const bool zero_target = std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });

    CfrModel model;
    model.num_points = n.size();
    std::optional<LinearFit> best;
    int best_k = k_range.k_min;
    for (int k = k_range.k_min; k <= k_range.k_max; ++k) {
        const LinearFit f = zero_target ? LinearFit{0.0, 0.0, 0.0} : fit_delay(n, d, k);
        model.k_search.push_back({k, f.a, f.b, f.sse});
        // Strictly better beyond the tie tolerance; otherwise the smaller k stays.
        if (!best || f.sse < best->sse - tie_rel * best->sse) {
            best = f;
            best_k = k;
        }
    }

    model.kernel = {best_k, best->a, best->b};
    model.cfr = cfr_from_params(best->a, best->b);
    model.sse = best->sse;
    model.fitted_deaths = DailySeries(cases.start_date(), predict_deaths(model.kernel, std::span<const double>(n)),
                                      SeriesKind::DailyDeaths);
    const auto cvs = parameter_cvs(model.kernel, n, d);
    model.cv_a = cvs.cv_a;
    model.cv_b = cvs.cv_b;
    return model;
}

} // namespace pec
