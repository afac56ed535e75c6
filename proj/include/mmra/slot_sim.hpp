#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmra/channel_model.hpp"
#include "mmra/random.hpp"
#include "mmra/stats.hpp"

namespace mmra {

using CVector = std::vector<std::complex<double>>;

/// Everything drawn for one uplink slot. Per-terminal vectors are indexed by
/// position in active_ids. Pilots are identified by index only; with
/// orthogonal pilots the despread observation
///   y_p = sqrt(tau_p) * sum_{j on pilot p} h_j + n_p,  n_p ~ CN(0, I_M)
/// is a sufficient statistic, so pilot waveforms are never materialized.
struct SlotRealization {
    std::vector<bool> active_flags;   ///< size K
    std::vector<int> active_ids;
    std::vector<int> pilot_index;     ///< 0-based, in [0, tau_p)
    std::vector<double> betas;
    std::vector<CVector> channels;    ///< h_j ~ CN(0, beta_j I_M)
    std::vector<CVector> estimates;   ///< MMSE estimate of h_j from y_{pilot(j)}
    std::vector<EstimationStats> estimation;
    std::vector<int> collider_count;
    /// Use-and-forget SINR: deterministic combining gain (M-1) * var_est and
    /// interference averaged over the channels given the betas and collisions.
    std::vector<double> effective_sinr;
    /// MRC SINR conditioned on the realized estimates:
    ///   |g|^4 / (sum_{colliders} |g^H g_j|^2 + |g|^2 (sum_group var_err + sum_others beta + 1))
    /// with g the terminal's own estimate.
    std::vector<double> conditional_sinr;

    int k_active() const noexcept { return static_cast<int>(active_ids.size()); }
};

/// MMSE scaling applied to y to estimate a terminal with coefficient beta on
/// a pilot whose users sum to group_beta: sqrt(tau_p) beta / (1 + tau_p group_beta).
double mmse_gain(double beta, double group_beta, int tau_p) noexcept;

/// Draws one slot. p_a = 0 is accepted and yields an empty active set.
SlotRealization simulate_slot(const SystemParams& params, const BetaDistribution& dist, Rng& rng);

struct EmpiricalRate {
    double value = 0.0;      ///< mean over slots of sum_active prelog * log2(1 + effective_sinr)
    double std_error = 0.0;
    std::size_t n_slots = 0;
    double conditional_value = 0.0;  ///< same with conditional_sinr; upper side of the Jensen step
    double conditional_std_error = 0.0;
};

/// Slots run in fixed-size batches, each with its own substream of seed, so
/// the result is bit-identical for a given seed regardless of thread count.
EmpiricalRate empirical_rate(const SystemParams& params, const BetaDistribution& dist, std::size_t n_slots,
                             std::uint64_t seed);

/// Relative standard deviation of |h|^2 / (M beta) over n_samples draws of
/// h ~ CN(0, beta I_M). Its expectation is 1 / sqrt(M).
double channel_hardening_stat(int M, double beta, std::size_t n_samples, std::uint64_t seed);

/// Empirical per-antenna variances of the MMSE estimate and its error for a
/// fixed pilot group, plus the normalized estimate/error correlation.
struct EmpiricalEstimation {
    double var_est = 0.0;
    double var_err = 0.0;
    double correlation = 0.0;
    std::size_t n = 0;
};

EmpiricalEstimation empirical_estimation_stats(double beta_0, std::span<const double> collider_betas, int tau_p,
                                               std::size_t n_realizations, std::uint64_t seed);

/// Activity, pilot and collision histograms over many slots. The collision
/// histogram tracks the lowest-indexed active terminal of each slot, whose
/// collider count is distributed as Binom(Ka - 1, 1 / tau_p).
struct AccessStatistics {
    std::size_t n_slots = 0;
    std::vector<double> active_hist;               ///< index Ka, size K + 1
    std::vector<double> pilot_hist;                ///< size tau_p, all active terminals
    std::vector<std::vector<double>> collider_hist; ///< [Ka][c], c < Ka
};

AccessStatistics access_statistics(const SystemParams& params, std::size_t n_slots, std::uint64_t seed);

ChiSquareResult activity_gof(const AccessStatistics& stats, const SystemParams& params);
ChiSquareResult pilot_gof(const AccessStatistics& stats, const SystemParams& params);
/// Per-Ka tests of c | Ka, summed into one statistic.
ChiSquareResult collision_gof(const AccessStatistics& stats, const SystemParams& params);

}  // namespace mmra
