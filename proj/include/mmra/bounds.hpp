#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mmra/binomial.hpp"
#include "mmra/channel_model.hpp"

namespace mmra {

/// One collision configuration seen from a reference terminal 0.
struct CollisionScenario {
    int k_active = 1;                   ///< Ka, includes terminal 0
    double beta_0 = 1.0;
    std::vector<double> collider_betas; ///< terminals sharing terminal 0's pilot
    std::vector<double> other_betas;    ///< remaining Ka - 1 - c active terminals

    int collider_count() const noexcept { return static_cast<int>(collider_betas.size()); }
};

void validate(const CollisionScenario& scenario);

enum class BoundId { R1, R2, R3, AsymHeuristic };
std::string_view to_string(BoundId id) noexcept;

/// A sum-rate value in bits/symbol with its provenance.
struct RateReport {
    BoundId bound_id = BoundId::R1;
    double value = 0.0;
    double std_error = 0.0;        ///< Monte-Carlo standard error, 0 for deterministic bounds
    SystemParams params;
    std::size_t n_samples = 0;
    double retained_mass = 1.0;    ///< binomial mass kept after truncation
};

/// Fraction of the slot carrying data, (tau_u - tau_p) / tau_u.
double prelog(int tau_u, int tau_p);

/// Explicit per-scenario SINR lower bound with MMSE estimation and MRC. Each
/// member of the pilot group {0} u C0 sees the other members as its colliders.
double sinr1(const CollisionScenario& scenario, const SystemParams& params);

/// The same SINR written in terms of estimation statistics:
///   (M-1) v0 b0^2 / ((M-1) v0 sum_C0 bj^2 + b0^2 (sum_group e_j + sum_others b + 1))
/// with v0 the estimate variance of terminal 0 and e_j the error variances of
/// every member of the pilot group (terminal 0 included).
double sinr_from_estimation(double beta_0, double var_est_0, std::span<const double> collider_betas,
                            std::span<const double> group_var_err, double other_beta_sum, int M);

/// sinr_from_estimation fed with mmse_variances for every group member.
double sinr1_via_estimation(const CollisionScenario& scenario, const SystemParams& params);

/// R1: activity and collision sums weighted by binomial pmfs, with the beta
/// expectation estimated by stratified Monte-Carlo per (Ka, c) cell. The
/// n_samples budget is split over cells in proportion to their mass with at
/// least two draws per cell; each cell draws from its own seeded substream.
RateReport rate1_mc(const SystemParams& params, const BetaDistribution& dist, std::size_t n_samples,
                    std::uint64_t seed);

/// Moment-averaged SINR for c colliders among Ka active terminals.
double sinr2(int c, int k_active, const SystemParams& params, const BetaMoments& moments);

/// R2: deterministic double sum of the moment-averaged rate.
RateReport rate2(const SystemParams& params, const BetaMoments& moments);

/// SINR after averaging the collision and activity counts in the denominator.
/// Requires p_a * K >= 1.
double sinr3(const SystemParams& params, const BetaMoments& moments);
RateReport rate3(const SystemParams& params, const BetaMoments& moments);

/// Large-system approximation of sinr3 keeping only the dominant terms. The
/// real-valued overload is used with tau_p = tau_u / 3.
double sinr_asym(double M, double tau_p, double pa_k, const BetaMoments& moments);
double sinr_asym(const SystemParams& params, const BetaMoments& moments);

/// p_a K (tau_u - tau_p) / tau_u * log2(1 + sinr_asym).
RateReport rate_asym(const SystemParams& params, const BetaMoments& moments);

}  // namespace mmra
