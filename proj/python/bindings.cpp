#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mmra/bounds.hpp"
#include "mmra/channel_model.hpp"
#include "mmra/experiment.hpp"
#include "mmra/optimizer.hpp"
#include "mmra/slot_sim.hpp"
#include "mmra/validation.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using release_gil = py::call_guard<py::gil_scoped_release>;

// Rows come back as a list of dicts keyed by the CSV header, cells as text
// converted to float where possible.
py::list table_to_records(const mmra::CsvTable& t) {
    py::list out;
    for (const auto& row : t.rows) {
        py::dict rec;
        for (std::size_t i = 0; i < t.header.size(); ++i) {
            const std::string& cell = row[i];
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used == cell.size()) {
                    rec[py::str(t.header[i])] = v;
                    continue;
                }
            } catch (const std::exception&) {
            }
            rec[py::str(t.header[i])] = cell;
        }
        out.append(rec);
    }
    return out;
}

std::string table_to_csv(const mmra::CsvTable& t) {
    std::ostringstream os;
    mmra::write_csv(t, os);
    return os.str();
}

template <class Rows>
py::tuple run_rows(Rows (*fn)(const mmra::ExperimentConfig&), const mmra::ExperimentConfig& c) {
    mmra::CsvTable table;
    {
        py::gil_scoped_release release;
        table = mmra::to_csv(fn(c));
    }
    return py::make_tuple(table_to_records(table), table_to_csv(table));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rate bounds, operating-point optimizer and slot simulator for massive-MIMO random access";

    py::register_exception<mmra::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<mmra::IoError>(m, "IoError", PyExc_OSError);

    py::class_<mmra::BetaDistribution>(m, "BetaDistribution")
        .def(py::init<double, double>(), "beta_bar"_a = 1.0, "alpha"_a = 0.0)
        .def_readwrite("beta_bar", &mmra::BetaDistribution::beta_bar)
        .def_readwrite("alpha", &mmra::BetaDistribution::alpha)
        .def("lower", &mmra::BetaDistribution::lower)
        .def("upper", &mmra::BetaDistribution::upper);

    py::class_<mmra::BetaMoments>(m, "BetaMoments")
        .def(py::init<>())
        .def_readwrite("mean", &mmra::BetaMoments::mean)
        .def_readwrite("mean_sq", &mmra::BetaMoments::mean_sq)
        .def_readwrite("inv_mean", &mmra::BetaMoments::inv_mean)
        .def_readwrite("inv_sq_mean", &mmra::BetaMoments::inv_sq_mean);

    py::class_<mmra::SystemParams>(m, "SystemParams")
        .def(py::init([](int M, int K, int tau_u, int tau_p, double p_a) {
                 mmra::SystemParams p{M, K, tau_u, tau_p, p_a, std::nullopt};
                 mmra::validate(p);
                 return p;
             }),
             "M"_a, "K"_a, "tau_u"_a, "tau_p"_a, "p_a"_a)
        .def_readwrite("M", &mmra::SystemParams::M)
        .def_readwrite("K", &mmra::SystemParams::K)
        .def_readwrite("tau_u", &mmra::SystemParams::tau_u)
        .def_readwrite("tau_p", &mmra::SystemParams::tau_p)
        .def_readwrite("p_a", &mmra::SystemParams::p_a)
        .def_readwrite("tau_c", &mmra::SystemParams::tau_c);

    py::class_<mmra::EstimationStats>(m, "EstimationStats")
        .def_readonly("var_est", &mmra::EstimationStats::var_est)
        .def_readonly("var_err", &mmra::EstimationStats::var_err);

    m.def("db_to_linear", &mmra::db_to_linear, "db"_a);
    m.def("analytic_moments", &mmra::analytic_moments, "dist"_a);
    m.def("numeric_moments", &mmra::numeric_moments, "dist"_a, "n_points"_a);
    m.def(
        "mmse_variances",
        [](double beta_0, const std::vector<double>& colliders, int tau_p) {
            return mmra::mmse_variances(beta_0, colliders, tau_p);
        },
        "beta_0"_a, "collider_betas"_a, "tau_p"_a);

    py::class_<mmra::CollisionScenario>(m, "CollisionScenario")
        .def(py::init([](int k_active, double beta_0, std::vector<double> colliders, std::vector<double> others) {
                 mmra::CollisionScenario s{k_active, beta_0, std::move(colliders), std::move(others)};
                 mmra::validate(s);
                 return s;
             }),
             "k_active"_a, "beta_0"_a, "collider_betas"_a, "other_betas"_a)
        .def_readonly("k_active", &mmra::CollisionScenario::k_active)
        .def_readonly("beta_0", &mmra::CollisionScenario::beta_0)
        .def_readonly("collider_betas", &mmra::CollisionScenario::collider_betas)
        .def_readonly("other_betas", &mmra::CollisionScenario::other_betas);

    py::enum_<mmra::BoundId>(m, "BoundId")
        .value("R1", mmra::BoundId::R1)
        .value("R2", mmra::BoundId::R2)
        .value("R3", mmra::BoundId::R3)
        .value("AsymHeuristic", mmra::BoundId::AsymHeuristic);

    py::class_<mmra::RateReport>(m, "RateReport")
        .def_readonly("bound_id", &mmra::RateReport::bound_id)
        .def_readonly("value", &mmra::RateReport::value)
        .def_readonly("std_error", &mmra::RateReport::std_error)
        .def_readonly("params", &mmra::RateReport::params)
        .def_readonly("n_samples", &mmra::RateReport::n_samples)
        .def_readonly("retained_mass", &mmra::RateReport::retained_mass);

    m.def("prelog", &mmra::prelog, "tau_u"_a, "tau_p"_a);
    m.def("sinr1", &mmra::sinr1, "scenario"_a, "params"_a);
    m.def("sinr1_via_estimation", &mmra::sinr1_via_estimation, "scenario"_a, "params"_a);
    m.def("rate1_mc", &mmra::rate1_mc, "params"_a, "dist"_a, "n_samples"_a, "seed"_a, release_gil());
    m.def("sinr2", &mmra::sinr2, "c"_a, "k_active"_a, "params"_a, "moments"_a);
    m.def("rate2", &mmra::rate2, "params"_a, "moments"_a, release_gil());
    m.def("sinr3", &mmra::sinr3, "params"_a, "moments"_a);
    m.def("rate3", &mmra::rate3, "params"_a, "moments"_a);
    m.def("sinr_asym", py::overload_cast<double, double, double, const mmra::BetaMoments&>(&mmra::sinr_asym), "M"_a,
          "tau_p"_a, "pa_k"_a, "moments"_a);
    m.def("rate_asym", &mmra::rate_asym, "params"_a, "moments"_a);

    m.def("solve_s0", &mmra::solve_s0, "tolerance"_a = 1e-13);
    m.def("s0_residual", &mmra::s0_residual, "x"_a);

    py::class_<mmra::HeuristicSolution>(m, "HeuristicSolution")
        .def_readonly("s0", &mmra::HeuristicSolution::s0)
        .def_readonly("tau_p_h", &mmra::HeuristicSolution::tau_p_h)
        .def_readonly("pa_h_times_K", &mmra::HeuristicSolution::pa_h_times_K)
        .def_readonly("pa_h", &mmra::HeuristicSolution::pa_h)
        .def_readonly("clamped", &mmra::HeuristicSolution::clamped)
        .def_readonly("sinr_h", &mmra::HeuristicSolution::sinr_h)
        .def_readonly("rate_h", &mmra::HeuristicSolution::rate_h);
    m.def("heuristic_params", &mmra::heuristic_params, "tau_u"_a, "M"_a, "K"_a, "moments"_a);

    py::class_<mmra::GridSpec>(m, "GridSpec")
        .def(py::init<int, int, int, int>(), "tau_p_min"_a = 1, "tau_p_max"_a = 0, "pa_k_min"_a = 1,
             "pa_k_max"_a = 0)
        .def_readwrite("tau_p_min", &mmra::GridSpec::tau_p_min)
        .def_readwrite("tau_p_max", &mmra::GridSpec::tau_p_max)
        .def_readwrite("pa_k_min", &mmra::GridSpec::pa_k_min)
        .def_readwrite("pa_k_max", &mmra::GridSpec::pa_k_max);

    py::class_<mmra::OptimumPoint>(m, "OptimumPoint")
        .def_readonly("tau_p_opt", &mmra::OptimumPoint::tau_p_opt)
        .def_readonly("pa_k_opt", &mmra::OptimumPoint::pa_k_opt)
        .def_readonly("pa_opt", &mmra::OptimumPoint::pa_opt)
        .def_readonly("rate_opt", &mmra::OptimumPoint::rate_opt)
        .def_readonly("grid_spec", &mmra::OptimumPoint::grid_spec)
        .def_readonly("n_evaluated", &mmra::OptimumPoint::n_evaluated);
    m.def("grid_optimize_r3", &mmra::grid_optimize_r3, "tau_u"_a, "M"_a, "K"_a, "moments"_a,
          "grid"_a = mmra::GridSpec{}, release_gil());

    py::enum_<mmra::ScalingRegime>(m, "ScalingRegime")
        .value("ManyAntennas", mmra::ScalingRegime::ManyAntennas)
        .value("LongSlots", mmra::ScalingRegime::LongSlots)
        .value("Balanced", mmra::ScalingRegime::Balanced);

    py::class_<mmra::ScalingPoint>(m, "ScalingPoint")
        .def_readonly("M", &mmra::ScalingPoint::M)
        .def_readonly("tau_u", &mmra::ScalingPoint::tau_u)
        .def_readonly("pa_k_h", &mmra::ScalingPoint::pa_k_h)
        .def_readonly("sinr_h", &mmra::ScalingPoint::sinr_h)
        .def_readonly("rate_h", &mmra::ScalingPoint::rate_h)
        .def_readonly("sinr_normalized", &mmra::ScalingPoint::sinr_normalized)
        .def_readonly("rate_normalized", &mmra::ScalingPoint::rate_normalized)
        .def_readonly("clamped", &mmra::ScalingPoint::clamped);
    m.def(
        "scaling_probe",
        [](mmra::ScalingRegime regime, const std::vector<std::pair<int, int>>& series, int K,
           const mmra::BetaMoments& mo) { return mmra::scaling_probe(regime, series, K, mo); },
        "regime"_a, "m_tau_u_series"_a, "K"_a, "moments"_a);

    py::class_<mmra::EmpiricalRate>(m, "EmpiricalRate")
        .def_readonly("value", &mmra::EmpiricalRate::value)
        .def_readonly("std_error", &mmra::EmpiricalRate::std_error)
        .def_readonly("n_slots", &mmra::EmpiricalRate::n_slots)
        .def_readonly("conditional_value", &mmra::EmpiricalRate::conditional_value)
        .def_readonly("conditional_std_error", &mmra::EmpiricalRate::conditional_std_error);
    m.def("empirical_rate", &mmra::empirical_rate, "params"_a, "dist"_a, "n_slots"_a, "seed"_a, release_gil());
    m.def("channel_hardening_stat", &mmra::channel_hardening_stat, "M"_a, "beta"_a, "n_samples"_a, "seed"_a,
          release_gil());

    py::enum_<mmra::ExperimentId>(m, "ExperimentId")
        .value("Fig1", mmra::ExperimentId::Fig1)
        .value("Fig2", mmra::ExperimentId::Fig2)
        .value("BoundsSweep", mmra::ExperimentId::BoundsSweep)
        .value("Validate", mmra::ExperimentId::Validate)
        .value("Scaling", mmra::ExperimentId::Scaling);

    py::class_<mmra::ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("experiment_id", &mmra::ExperimentConfig::experiment_id)
        .def_readwrite("K", &mmra::ExperimentConfig::K)
        .def_readwrite("snr_db", &mmra::ExperimentConfig::snr_db)
        .def_readwrite("alpha", &mmra::ExperimentConfig::alpha)
        .def_readwrite("M_list", &mmra::ExperimentConfig::M_list)
        .def_readwrite("tau_u_list", &mmra::ExperimentConfig::tau_u_list)
        .def_readwrite("mc_samples", &mmra::ExperimentConfig::mc_samples)
        .def_readwrite("seed", &mmra::ExperimentConfig::seed)
        .def_readwrite("output_dir", &mmra::ExperimentConfig::output_dir)
        .def_readwrite("tau_p_list", &mmra::ExperimentConfig::tau_p_list)
        .def_readwrite("pa_k_list", &mmra::ExperimentConfig::pa_k_list)
        .def_readwrite("sim_slots", &mmra::ExperimentConfig::sim_slots)
        .def_readwrite("full_scale", &mmra::ExperimentConfig::full_scale)
        .def("distribution", &mmra::ExperimentConfig::distribution);

    m.def("default_config", &mmra::default_config, "experiment_id"_a, "full_scale"_a = false);
    m.def(
        "parse_config",
        [](const std::string& text, bool full_scale) {
            std::istringstream in(text);
            return mmra::parse_config(in, std::nullopt, full_scale);
        },
        "text"_a, "full_scale"_a = false);

    // Each runner returns (records, csv_text).
    m.def(
        "run_fig1", [](const mmra::ExperimentConfig& c) { return run_rows(&mmra::run_fig1, c); }, "config"_a);
    m.def(
        "run_fig2", [](const mmra::ExperimentConfig& c) { return run_rows(&mmra::run_fig2, c); }, "config"_a);
    m.def(
        "run_bounds_sweep", [](const mmra::ExperimentConfig& c) { return run_rows(&mmra::run_bounds_sweep, c); },
        "config"_a);
    m.def(
        "run_scaling", [](const mmra::ExperimentConfig& c) { return run_rows(&mmra::run_scaling, c); },
        "config"_a);
    m.def(
        "run_validate",
        [](const mmra::ExperimentConfig& c) {
            mmra::ValidationReport report;
            {
                py::gil_scoped_release release;
                report = mmra::run_validate(c);
            }
            return py::make_tuple(report.all_passed(), report.to_text());
        },
        "config"_a);
}
