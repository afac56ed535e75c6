#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "mmra/random.hpp"

namespace mmra {

/// Large-scale fading coefficient model: beta is uniform on
/// [beta_bar * (1 - alpha), beta_bar * (1 + alpha)].
///
/// beta_bar is a linear power ratio (it doubles as the per-antenna SNR since
/// the noise is normalized to unit variance). alpha = 0 is a point mass.
struct BetaDistribution {
    double beta_bar = 1.0;
    double alpha = 0.0;

    double lower() const noexcept { return beta_bar * (1.0 - alpha); }
    double upper() const noexcept { return beta_bar * (1.0 + alpha); }
};

/// E[beta], E[beta^2], E[1/beta], E[1/beta^2].
struct BetaMoments {
    double mean = 1.0;
    double mean_sq = 1.0;
    double inv_mean = 1.0;
    double inv_sq_mean = 1.0;
};

/// Scalar configuration of the single-cell uplink.
struct SystemParams {
    int M = 2;          ///< BS antennas
    int K = 1;          ///< terminals in the cell
    int tau_u = 2;      ///< uplink slot length (symbols)
    int tau_p = 1;      ///< pilot length == number of orthogonal pilots
    double p_a = 1.0;   ///< per-slot activation probability
    std::optional<int> tau_c;  ///< coherence interval, if constrained
};

/// Split of a channel's variance into MMSE estimate and estimation error.
struct EstimationStats {
    double var_est = 0.0;
    double var_err = 0.0;
};

// Validators throw std::invalid_argument naming the offending field.
void validate(const BetaDistribution& dist);
void validate(const SystemParams& params);

double db_to_linear(double db) noexcept;

/// Closed-form moments of the uniform model. Throws for alpha >= 1, where
/// E[1/beta] diverges.
BetaMoments analytic_moments(const BetaDistribution& dist);

/// Same moments by composite midpoint quadrature with n_points cells over the
/// support. Independent of analytic_moments; used to cross-check it.
BetaMoments numeric_moments(const BetaDistribution& dist, std::size_t n_points);

double sample_beta(const BetaDistribution& dist, Rng& rng);

/// Variances of the MMSE estimate of terminal 0's channel when the terminals
/// with collider_betas send the same pilot:
///   var_est = tau_p * beta_0^2 / (1 + tau_p * (beta_0 + sum(colliders)))
///   var_err = beta_0 - var_est
EstimationStats mmse_variances(double beta_0, std::span<const double> collider_betas, int tau_p);

}  // namespace mmra
