#include "mmra/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmra/binomial.hpp"
#include "mmra/optimizer.hpp"
#include "mmra/random.hpp"
#include "mmra/slot_sim.hpp"

namespace mmra {
namespace {

constexpr double kSignificance = 0.01;

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Simulator reference point shared by the statistics checks.
SystemParams desk_sim_params() { return {32, 50, 60, 10, 0.2, std::nullopt}; }

}  // namespace

bool ValidationReport::all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    std::size_t failed = 0;
    for (const auto& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        failed += !c.passed;
    }
    os << "summary: " << (checks.size() - failed) << '/' << checks.size() << " passed\n";
    return os.str();
}

CheckResult check_moment_oracle() {
    double worst = 0.0;
    std::string where;
    for (double b : {0.1, 1.0, 10.0}) {
        for (double a : {0.0, 0.25, 0.5, 0.9}) {
            const BetaDistribution d{b, a};
            const auto x = analytic_moments(d);
            const auto y = numeric_moments(d, 1'000'000);
            for (double r : {rel_diff(x.mean, y.mean), rel_diff(x.mean_sq, y.mean_sq), rel_diff(x.inv_mean, y.inv_mean),
                             rel_diff(x.inv_sq_mean, y.inv_sq_mean)}) {
                if (r > worst) {
                    worst = r;
                    where = "beta_bar=" + fmt(b) + " alpha=" + fmt(a);
                }
            }
        }
    }
    return {"moment_oracle", worst < 1e-6, "max relative gap " + fmt(worst) + (where.empty() ? "" : " at " + where)};
}

CheckResult check_substitution_identity(const Sinr1Fn& explicit_sinr, std::size_t n_scenarios, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x5b5);
    std::uniform_int_distribution<int> ka_dist(1, 30), tp_dist(1, 64), m_dist(2, 512);
    std::uniform_real_distribution<double> beta_dist(0.05, 40.0);
    double worst = 0.0;
    std::string where;
    for (std::size_t i = 0; i < n_scenarios; ++i) {
        CollisionScenario s;
        s.k_active = ka_dist(rng);
        const int c = std::uniform_int_distribution<int>(0, s.k_active - 1)(rng);
        s.beta_0 = beta_dist(rng);
        for (int j = 0; j < c; ++j) s.collider_betas.push_back(beta_dist(rng));
        for (int j = 0; j < s.k_active - 1 - c; ++j) s.other_betas.push_back(beta_dist(rng));
        const SystemParams p{m_dist(rng), s.k_active, 1000, tp_dist(rng), 1.0, std::nullopt};
        const double r = rel_diff(explicit_sinr(s, p), sinr1_via_estimation(s, p));
        if (r > worst) {
            worst = r;
            where = "Ka=" + std::to_string(s.k_active) + " c=" + std::to_string(c) + " M=" + std::to_string(p.M) +
                    " tau_p=" + std::to_string(p.tau_p);
        }
    }
    return {"substitution_identity", worst < 1e-10,
            std::to_string(n_scenarios) + " scenarios, max relative gap " + fmt(worst) +
                (where.empty() ? "" : " at " + where)};
}

CheckResult check_s0_root() {
    const double s0 = solve_s0();
    const double newton = solve_s0_newton();
    const double residual = std::abs(s0_residual(s0));
    const bool ok = std::abs(s0 - 3.92) <= 0.01 && residual < 1e-10 && std::abs(s0 - newton) < 1e-10;
    std::ostringstream os;
    os.precision(12);
    os << "s0=" << s0 << " newton=" << newton << " residual=" << residual;
    return {"s0_root", ok, os.str()};
}

CheckResult check_binomial_normalization(const ExperimentConfig& c) {
    double full = 0.0;
    for (int r = 0; r <= 800; ++r) full += std::exp(binom_log_pmf({800, r, 0.5}));
    double worst_retained = 1.0;
    for (double pa : {0.01, 0.1, 0.5}) {
        const auto t = binomial_support(c.K, pa);
        worst_retained = std::min(worst_retained, t.retained_mass);
    }
    const bool ok = std::abs(full - 1.0) < 1e-10 && worst_retained >= 1.0 - 1e-9;
    return {"binomial_normalization", ok,
            "sum pmf(800, 0.5)-1=" + fmt(full - 1.0) + " min retained mass (K=" + std::to_string(c.K) +
                ")=" + fmt(worst_retained)};
}

CheckResult check_access_statistics(std::size_t n_slots, std::uint64_t seed) {
    const auto p = desk_sim_params();
    const auto st = access_statistics(p, n_slots, seed);
    const auto ka = activity_gof(st, p);
    const auto col = collision_gof(st, p);
    const auto pil = pilot_gof(st, p);
    const bool ok = ka.p_value >= kSignificance && col.p_value >= kSignificance && pil.p_value >= kSignificance;
    return {"access_statistics", ok,
            std::to_string(n_slots) + " slots; p-values Ka=" + fmt(ka.p_value) + " c|Ka=" + fmt(col.p_value) +
                " pilot=" + fmt(pil.p_value)};
}

CheckResult check_estimation_variances(std::size_t n, std::uint64_t seed) {
    struct Case {
        double beta_0;
        std::vector<double> colliders;
        int tau_p;
    };
    const std::vector<Case> cases{{10.0, {}, 10}, {10.0, {8.0, 12.0}, 10}, {1.0, {1.0}, 1}};
    double worst = 0.0, worst_corr = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& cs = cases[i];
        const auto exact = mmse_variances(cs.beta_0, cs.colliders, cs.tau_p);
        const auto emp = empirical_estimation_stats(cs.beta_0, cs.colliders, cs.tau_p, n, derive_seed(seed, i));
        worst = std::max({worst, std::abs(emp.var_est / exact.var_est - 1.0),
                          std::abs(emp.var_err / exact.var_err - 1.0)});
        worst_corr = std::max(worst_corr, std::abs(emp.correlation));
    }
    return {"estimation_variances", worst < 0.02 && worst_corr < 0.02,
            std::to_string(n) + " realizations, max relative error " + fmt(worst) + ", max |corr(est, err)| " +
                fmt(worst_corr)};
}

CheckResult check_bound_ordering(const ExperimentConfig& c) {
    const auto dist = c.distribution();
    const auto mo = analytic_moments(dist);
    bool ok = true;
    std::string first_failure;
    double min_margin = 1e300;
    std::size_t points = 0;
    for (int tau_u : c.tau_u_list) {
        for (int M : c.M_list) {
            const auto opt = grid_optimize_r3(tau_u, M, c.K, mo);
            const auto h = heuristic_params(tau_u, M, c.K, mo);
            const std::vector<std::pair<int, double>> pts{{opt.tau_p_opt, opt.pa_opt},
                                                          {heuristic_tau_p(tau_u), std::max(h.pa_h, 1.0 / c.K)}};
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const SystemParams p{M, c.K, tau_u, pts[i].first, pts[i].second, std::nullopt};
                const auto r1 = rate1_mc(p, dist, c.mc_samples, derive_seed(c.seed, points, 0xb0));
                const double r2 = rate2(p, mo).value;
                const double r3 = rate3(p, mo).value;
                ++points;
                min_margin = std::min(min_margin, r2 - r3);
                if (!(r3 <= r2 && r2 <= r1.value + 3.0 * r1.std_error)) {
                    ok = false;
                    if (first_failure.empty())
                        first_failure = " first violation at tau_u=" + std::to_string(tau_u) + " M=" +
                                        std::to_string(M) + " tau_p=" + std::to_string(p.tau_p) + ": R1=" +
                                        fmt(r1.value) + " R2=" + fmt(r2) + " R3=" + fmt(r3);
                }
            }
        }
    }
    return {"bound_ordering", ok,
            std::to_string(points) + " points, min R2-R3 " + fmt(min_margin) + first_failure};
}

CheckResult check_simulator_cross_validation(std::size_t n_slots, std::size_t mc_samples, std::uint64_t seed) {
    const auto p = desk_sim_params();
    const BetaDistribution dist{10.0, 0.25};
    const auto mo = analytic_moments(dist);
    const auto emp = empirical_rate(p, dist, n_slots, derive_seed(seed, 1));
    const auto r1 = rate1_mc(p, dist, mc_samples, derive_seed(seed, 2));
    const double r2 = rate2(p, mo).value;
    const double r3 = rate3(p, mo).value;
    const double combined = std::hypot(emp.std_error, r1.std_error);
    const double z = (emp.value - r1.value) / combined;
    const bool ok = std::abs(z) <= 3.0 && emp.value > r2 && emp.value > r3;
    return {"simulator_cross_validation", ok,
            "empirical=" + fmt(emp.value) + "+-" + fmt(emp.std_error) + " R1=" + fmt(r1.value) + "+-" +
                fmt(r1.std_error) + " z=" + fmt(z) + " R2=" + fmt(r2) + " R3=" + fmt(r3)};
}

CheckResult check_channel_hardening(std::uint64_t seed) {
    bool ok = true;
    std::string detail;
    for (int M : {100, 400}) {
        const double stat = channel_hardening_stat(M, 10.0, 20000, derive_seed(seed, static_cast<std::uint64_t>(M)));
        const double expected = 1.0 / std::sqrt(static_cast<double>(M));
        ok = ok && std::abs(stat / expected - 1.0) <= 0.10;
        if (!detail.empty()) detail += ", ";
        detail += "M=" + std::to_string(M) + " rel.std=" + fmt(stat) + " (1/sqrt(M)=" + fmt(expected) + ")";
    }
    return {"channel_hardening", ok, detail};
}

CheckResult check_heuristic_stationarity(const ExperimentConfig& c) {
    const auto mo = analytic_moments(c.distribution());
    double worst = 0.0;
    std::size_t used = 0;
    for (int tau_u : c.tau_u_list) {
        for (int M : c.M_list) {
            const auto h = heuristic_params(tau_u, M, c.K, mo);
            if (h.clamped) continue;
            const double x = M * h.tau_p_h / (mo.mean * mo.mean * mo.inv_sq_mean * h.pa_h_times_K * h.pa_h_times_K);
            const double g = (1.0 + x) / x * std::log1p(x);
            worst = std::max({worst, std::abs(1.0 + g - tau_u / h.tau_p_h), std::abs(g - 2.0)});
            ++used;
        }
    }
    return {"heuristic_stationarity", used > 0 && worst < 1e-6,
            std::to_string(used) + " unclamped points, max residual " + fmt(worst)};
}

ValidationReport run_validate(const ExperimentConfig& c, const ValidationHooks& hooks) {
    validate(c);
    ValidationReport report;
    report.checks.push_back(check_moment_oracle());
    report.checks.push_back(check_substitution_identity(hooks.sinr1, 100, c.seed));
    report.checks.push_back(check_s0_root());
    report.checks.push_back(check_binomial_normalization(c));
    report.checks.push_back(check_access_statistics(c.sim_slots, c.seed));
    report.checks.push_back(check_estimation_variances(100000, c.seed));
    report.checks.push_back(check_bound_ordering(c));
    report.checks.push_back(check_simulator_cross_validation(c.sim_slots, c.mc_samples, c.seed));
    report.checks.push_back(check_channel_hardening(c.seed));
    report.checks.push_back(check_heuristic_stationarity(c));
    return report;
}

}  // namespace mmra
