#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmra/channel_model.hpp"

namespace mmra {

/// f(x) = ln(1 + x) - 2x / (1 + x). Its positive root s0 balances the
/// per-terminal SINR against the number of active terminals.
double s0_residual(double x) noexcept;

/// Bisection on [1, 10] until the bracket is narrower than tolerance.
double solve_s0(double tolerance = 1e-13);
/// Newton iteration from x = 4 until the step is below tolerance.
double solve_s0_newton(double tolerance = 1e-13);

/// Closed-form pilot length and load that approximately maximize R3:
/// tau_p = tau_u / 3 and p_a K = sqrt(tau_u M / (3 s0 E[b]^2 E[1/b^2])).
struct HeuristicSolution {
    double s0 = 0.0;
    double tau_p_h = 0.0;       ///< tau_u / 3, not rounded
    double pa_h_times_K = 0.0;  ///< formula value, never clamped
    double pa_h = 0.0;          ///< min(pa_h_times_K / K, 1)
    bool clamped = false;       ///< pa_h_times_K exceeded K
    double sinr_h = 0.0;        ///< large-system SINR at the heuristic point
    double rate_h = 0.0;        ///< min(pa_h_times_K, K) * 2/3 * log2(1 + sinr_h)
};

HeuristicSolution heuristic_params(int tau_u, int M, int K, const BetaMoments& moments);

/// Nearest integer to tau_u / 3, at least 1 and below tau_u.
int heuristic_tau_p(int tau_u);

/// Search box for grid_optimize_r3. Zero upper limits mean "tau_u - 1" and
/// "K" respectively. The load axis is the expected number of active
/// terminals p_a K in unit steps.
struct GridSpec {
    int tau_p_min = 1;
    int tau_p_max = 0;
    int pa_k_min = 1;
    int pa_k_max = 0;
};

struct OptimumPoint {
    int tau_p_opt = 0;
    int pa_k_opt = 0;
    double pa_opt = 0.0;
    double rate_opt = 0.0;
    std::string grid_spec;
    std::size_t n_evaluated = 0;
};

/// Exhaustive maximization of R3. Ties keep the first point in (tau_p, p_a K)
/// lexicographic order. Throws std::invalid_argument on an empty grid.
OptimumPoint grid_optimize_r3(int tau_u, int M, int K, const BetaMoments& moments, const GridSpec& grid = {});

enum class ScalingRegime {
    ManyAntennas,  ///< M >> tau_u
    LongSlots,     ///< M << tau_u
    Balanced,      ///< M ~ tau_u
};

std::string_view to_string(ScalingRegime regime) noexcept;

/// Heuristic operating point along a scale series, with the SINR and rate
/// divided by the growth law expected in the regime so that converging
/// columns indicate the law holds.
struct ScalingPoint {
    int M = 0;
    int tau_u = 0;
    double pa_k_h = 0.0;
    double sinr_h = 0.0;
    double rate_h = 0.0;
    double sinr_normalized = 0.0;
    double rate_normalized = 0.0;
    bool clamped = false;  ///< p_a K exceeded K; values use the unclamped load
};

std::vector<ScalingPoint> scaling_probe(ScalingRegime regime, std::span<const std::pair<int, int>> m_tau_u_series,
                                        int K, const BetaMoments& moments);

}  // namespace mmra
