#include "mmra/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mmra/bounds.hpp"
#include "mmra/parallel.hpp"

namespace mmra {
namespace {

double heuristic_load(int tau_u, int M, const BetaMoments& mo, double s0) {
    return std::sqrt(static_cast<double>(tau_u) * M / (3.0 * s0 * mo.mean * mo.mean * mo.inv_sq_mean));
}

// The prelog at tau_p = tau_u / 3 is exactly 2/3.
double heuristic_rate(double pa_k, double sinr) { return pa_k * (2.0 / 3.0) * std::log2(1.0 + sinr); }

}  // namespace

double s0_residual(double x) noexcept { return std::log1p(x) - 2.0 * x / (1.0 + x); }

double solve_s0(double tolerance) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solve_s0: tolerance must be positive");
    double lo = 1.0, hi = 10.0;  // f(1) < 0 < f(10)
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (s0_residual(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double solve_s0_newton(double tolerance) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solve_s0_newton: tolerance must be positive");
    double x = 4.0;
    for (int it = 0; it < 100; ++it) {
        const double d = (x - 1.0) / ((1.0 + x) * (1.0 + x));  // f'(x)
        const double step = s0_residual(x) / d;
        x -= step;
        if (std::abs(step) < tolerance) return x;
    }
    throw std::runtime_error("solve_s0_newton: no convergence");
}

int heuristic_tau_p(int tau_u) {
    const int t = static_cast<int>(std::lround(tau_u / 3.0));
    return std::clamp(t, 1, std::max(1, tau_u - 1));
}

HeuristicSolution heuristic_params(int tau_u, int M, int K, const BetaMoments& mo) {
    if (tau_u < 3) throw std::invalid_argument("heuristic_params: tau_u must be >= 3");
    if (M < 2) throw std::invalid_argument("heuristic_params: M must be >= 2");
    if (K < 1) throw std::invalid_argument("heuristic_params: K must be >= 1");

    HeuristicSolution h;
    h.s0 = solve_s0();
    h.tau_p_h = tau_u / 3.0;
    h.pa_h_times_K = heuristic_load(tau_u, M, mo, h.s0);
    h.clamped = h.pa_h_times_K > K;
    const double load = h.clamped ? static_cast<double>(K) : h.pa_h_times_K;
    h.pa_h = load / K;
    h.sinr_h = sinr_asym(M, h.tau_p_h, load, mo);
    h.rate_h = heuristic_rate(load, h.sinr_h);
    return h;
}

OptimumPoint grid_optimize_r3(int tau_u, int M, int K, const BetaMoments& mo, const GridSpec& grid) {
    const int tp_lo = std::max(1, grid.tau_p_min);
    const int tp_hi = std::min(tau_u - 1, grid.tau_p_max > 0 ? grid.tau_p_max : tau_u - 1);
    const int x_lo = std::max(1, grid.pa_k_min);
    const int x_hi = std::min(K, grid.pa_k_max > 0 ? grid.pa_k_max : K);
    if (tp_lo > tp_hi || x_lo > x_hi || M < 2)
        throw std::invalid_argument("grid_optimize_r3: empty feasible grid for tau_u=" + std::to_string(tau_u) +
                                    " K=" + std::to_string(K));

    struct RowBest {
        int pa_k = 0;
        double rate = -1.0;
    };
    const auto rows = static_cast<std::size_t>(tp_hi - tp_lo + 1);
    std::vector<RowBest> best(rows);
    parallel_for(rows, [&](std::size_t i) {
        SystemParams p{M, K, tau_u, tp_lo + static_cast<int>(i), 1.0, std::nullopt};
        RowBest b;
        for (int x = x_lo; x <= x_hi; ++x) {
            p.p_a = static_cast<double>(x) / K;
            const double r = rate3(p, mo).value;
            if (r > b.rate) b = {x, r};
        }
        best[i] = b;
    });

    OptimumPoint opt;
    opt.rate_opt = -1.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (best[i].rate > opt.rate_opt) {
            opt.tau_p_opt = tp_lo + static_cast<int>(i);
            opt.pa_k_opt = best[i].pa_k;
            opt.rate_opt = best[i].rate;
        }
    }
    for (const auto& b : best)
        if (b.rate > opt.rate_opt) throw std::logic_error("grid_optimize_r3: optimality certificate violated");

    opt.pa_opt = static_cast<double>(opt.pa_k_opt) / K;
    opt.n_evaluated = rows * static_cast<std::size_t>(x_hi - x_lo + 1);
    opt.grid_spec = "tau_p=" + std::to_string(tp_lo) + ".." + std::to_string(tp_hi) + " pa_K=" + std::to_string(x_lo) +
                    ".." + std::to_string(x_hi) + " step 1";
    return opt;
}

std::string_view to_string(ScalingRegime regime) noexcept {
    switch (regime) {
        case ScalingRegime::ManyAntennas: return "many_antennas";
        case ScalingRegime::LongSlots: return "long_slots";
        case ScalingRegime::Balanced: return "balanced";
    }
    return "?";
}

std::vector<ScalingPoint> scaling_probe(ScalingRegime regime, std::span<const std::pair<int, int>> series, int K,
                                        const BetaMoments& mo) {
    const double s0 = solve_s0();
    std::vector<ScalingPoint> out;
    out.reserve(series.size());
    for (const auto& [M, tau_u] : series) {
        if (M < 2 || tau_u < 3) throw std::invalid_argument("scaling_probe: need M >= 2 and tau_u >= 3");
        ScalingPoint pt;
        pt.M = M;
        pt.tau_u = tau_u;
        pt.pa_k_h = heuristic_load(tau_u, M, mo, s0);
        pt.clamped = pt.pa_k_h > K;
        pt.sinr_h = sinr_asym(M, tau_u / 3.0, pt.pa_k_h, mo);
        pt.rate_h = heuristic_rate(pt.pa_k_h, pt.sinr_h);
        const double m = M, t = tau_u;
        switch (regime) {
            case ScalingRegime::ManyAntennas:
                pt.sinr_normalized = pt.sinr_h * std::sqrt(m / t);
                pt.rate_normalized = pt.rate_h / t;
                break;
            case ScalingRegime::LongSlots:
                pt.sinr_normalized = pt.sinr_h * std::sqrt(t / m);
                pt.rate_normalized = pt.rate_h / m;
                break;
            case ScalingRegime::Balanced:
                pt.sinr_normalized = pt.sinr_h;
                pt.rate_normalized = pt.rate_h / std::sqrt(t * m);
                break;
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace mmra
