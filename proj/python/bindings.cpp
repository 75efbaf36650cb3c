#include "pec/cfr_estimation.hpp"
#include "pec/cost_model.hpp"
#include "pec/errors.hpp"
#include "pec/reporting.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pec;

namespace {

StrategyParams params_from(std::optional<double> alpha, std::optional<double> beta, std::optional<double> gamma,
                           std::optional<double> r_open, std::optional<double> r_close, double i0, double period)
{
    StrategyInput in;
    in.alpha = alpha;
    in.beta = beta;
    in.gamma = gamma;
    in.r_open = r_open;
    in.r_close = r_close;
    in.i0 = i0;
    in.period = period;
    return in.resolve();
}

DailySeries series_from(const std::string& start, std::vector<double> values, SeriesKind kind)
{
    return DailySeries(parse_iso_date(start), std::move(values), kind);
}

#define PEC_STRATEGY_ARGS                                                                                    \
    py::kw_only(), py::arg("alpha") = py::none(), py::arg("beta") = py::none(), py::arg("gamma") = py::none(), \
        py::arg("r_open") = py::none(), py::arg("r_close") = py::none(), py::arg("i0") = 21000.0,            \
        py::arg("period") = 54.0

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Periodic epidemic control core (C++)";

    py::register_exception<InvalidParameters>(m, "InvalidParameters", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    m.attr("default_gamma") = default_gamma;

    m.def(
        "phase_lengths",
        [](std::optional<double> alpha, std::optional<double> beta, std::optional<double> gamma,
           std::optional<double> r_open, std::optional<double> r_close, double i0, double period) {
            const auto pl = phase_lengths(params_from(alpha, beta, gamma, r_open, r_close, i0, period));
            return py::make_tuple(pl.t_open, pl.t_close);
        },
        PEC_STRATEGY_ARGS, "(t_open, t_close) in days");

    m.def(
        "average_rt",
        [](const std::vector<std::pair<double, double>>& phases) {
            std::vector<Phase> ph;
            for (auto [rt, d] : phases) {
                ph.push_back({rt, d});
            }
            return average_rt(PhaseSchedule(ph, CycleOrder::Custom));
        },
        py::arg("phases"), "mean R_t of [(rt, duration), ...]");

    m.def(
        "schedule_json",
        [](std::optional<double> alpha, std::optional<double> beta, std::optional<double> gamma,
           std::optional<double> r_open, std::optional<double> r_close, double i0, double period) {
            return schedule_json(params_from(alpha, beta, gamma, r_open, r_close, i0, period)).dump();
        },
        PEC_STRATEGY_ARGS);

    m.def(
        "simulate_json",
        [](const std::string& order, double step, std::optional<double> alpha, std::optional<double> beta,
           std::optional<double> gamma, std::optional<double> r_open, std::optional<double> r_close, double i0,
           double period) {
            const auto p = params_from(alpha, beta, gamma, r_open, r_close, i0, period);
            const auto s = simulation_schedule(p, parse_simulation_order(order));
            return trajectory_json(solve_trajectory(p.i0, s, p.gamma, step), s, p.gamma).dump();
        },
        py::arg("order") = "OC-then-CO", py::arg("step") = 1.0, PEC_STRATEGY_ARGS);

    m.def(
        "simulate_custom",
        [](const std::vector<std::pair<double, double>>& phases, double i0, double gamma, double step) {
            std::vector<Phase> ph;
            for (auto [rt, d] : phases) {
                ph.push_back({rt, d});
            }
            const auto tr = solve_trajectory(i0, PhaseSchedule(ph, CycleOrder::Custom), gamma, step);
            return py::make_tuple(tr.times, tr.active);
        },
        py::arg("phases"), py::arg("i0"), py::arg("gamma") = default_gamma, py::arg("step") = 1.0,
        "(times, active) for an arbitrary [(rt, duration), ...] schedule");

    m.def(
        "compare_costs_json",
        [](std::optional<double> alpha, std::optional<double> beta, std::optional<double> gamma,
           std::optional<double> r_open, std::optional<double> r_close, double i0, double period) {
            return compare_costs_json(params_from(alpha, beta, gamma, r_open, r_close, i0, period)).dump();
        },
        PEC_STRATEGY_ARGS);

    m.def("cfr_from_params", &cfr_from_params, py::arg("a"), py::arg("b"));

    m.def(
        "predict_deaths",
        [](int k, double a, double b, const std::vector<double>& new_cases) {
            return predict_deaths(DeathKernel{k, a, b}, std::span<const double>(new_cases));
        },
        py::arg("k"), py::arg("a"), py::arg("b"), py::arg("new_cases"));

    m.def(
        "fit_cfr_json",
        [](const std::string& start, std::vector<double> new_cases, std::vector<double> deaths, int k_min,
           int k_max, size_t min_points) {
            const auto model = fit(series_from(start, std::move(new_cases), SeriesKind::NewCases),
                                   series_from(start, std::move(deaths), SeriesKind::DailyDeaths), {k_min, k_max},
                                   min_points);
            return cfr_model_json(model).dump();
        },
        py::arg("start"), py::arg("new_cases"), py::arg("deaths"), py::arg("k_min") = 0, py::arg("k_max") = 15,
        py::arg("min_points") = 60, "fit on already smoothed, date-aligned daily series starting at `start`");

    m.def(
        "country_fit_cfr_json",
        [](const std::string& data_dir, const std::string& country, const std::string& from, const std::string& to,
           int k_min, int k_max) {
            const auto data = load_country(data_dir, country);
            CfrFitOptions opt;
            opt.from = parse_iso_date(from);
            opt.to = parse_iso_date(to);
            opt.k_range = {k_min, k_max};
            return cfr_model_json(fit_cfr(data.confirmed, data.deaths, opt)).dump();
        },
        py::arg("data_dir"), py::arg("country") = "Israel", py::arg("from_date") = "2020-06-01",
        py::arg("to_date") = "2020-12-29", py::arg("k_min") = 0, py::arg("k_max") = 15);

    m.def(
        "ingest_json",
        [](const std::string& data_dir, const std::string& country) {
            return to_long_json(ingest_series(load_country(data_dir, country)));
        },
        py::arg("data_dir"), py::arg("country") = "Israel");

    m.def(
        "validate_json",
        [](const std::string& data_dir, const std::string& country, std::optional<double> cfr) {
            ValidationOptions opt;
            opt.cfr_override = cfr;
            return validation_json(validate(load_country(data_dir, country), opt)).dump();
        },
        py::arg("data_dir"), py::arg("country") = "Israel", py::arg("cfr") = py::none());
}
