#include "mmra/channel_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmra {

void validate(const BetaDistribution& dist) {
    if (!(dist.beta_bar > 0.0) || !std::isfinite(dist.beta_bar))
        throw std::invalid_argument("beta_bar must be positive and finite, got " + std::to_string(dist.beta_bar));
    if (!(dist.alpha >= 0.0 && dist.alpha < 1.0))
        throw std::invalid_argument("alpha must lie in [0, 1), got " + std::to_string(dist.alpha));
}

void validate(const SystemParams& p) {
    if (p.M < 2) throw std::invalid_argument("M must be >= 2, got " + std::to_string(p.M));
    if (p.K < 1) throw std::invalid_argument("K must be >= 1, got " + std::to_string(p.K));
    if (p.tau_u < 2) throw std::invalid_argument("tau_u must be >= 2, got " + std::to_string(p.tau_u));
    if (p.tau_p < 1 || p.tau_p >= p.tau_u)
        throw std::invalid_argument("tau_p must satisfy 1 <= tau_p < tau_u, got tau_p=" + std::to_string(p.tau_p) +
                                    " tau_u=" + std::to_string(p.tau_u));
    if (!(p.p_a > 0.0 && p.p_a <= 1.0))
        throw std::invalid_argument("p_a must lie in (0, 1], got " + std::to_string(p.p_a));
    if (p.tau_c) {
        if (p.tau_u > *p.tau_c)
            throw std::invalid_argument("tau_u must not exceed tau_c, got tau_u=" + std::to_string(p.tau_u) +
                                        " tau_c=" + std::to_string(*p.tau_c));
    }
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

BetaMoments analytic_moments(const BetaDistribution& dist) {
    validate(dist);
    const double b = dist.beta_bar;
    const double a = dist.alpha;
    if (a == 0.0) return {b, b * b, 1.0 / b, 1.0 / (b * b)};
    // ln((1+a)/(1-a)) / (2a) written as atanh(a)/a to stay accurate for small a.
    return {
        b,
        b * b * (1.0 + a * a / 3.0),
        std::atanh(a) / (a * b),
        1.0 / (b * b * (1.0 - a * a)),
    };
}

BetaMoments numeric_moments(const BetaDistribution& dist, std::size_t n_points) {
    validate(dist);
    if (n_points < 2) throw std::invalid_argument("numeric_moments needs n_points >= 2");
    if (dist.alpha == 0.0) {
        const double b = dist.beta_bar;
        return {b, b * b, 1.0 / b, 1.0 / (b * b)};
    }

    const double lo = dist.lower();
    const double h = (dist.upper() - lo) / static_cast<double>(n_points);
    long double s1 = 0, s2 = 0, sm1 = 0, sm2 = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const long double x = lo + (static_cast<long double>(i) + 0.5L) * h;
        s1 += x;
        s2 += x * x;
        sm1 += 1.0L / x;
        sm2 += 1.0L / (x * x);
    }
    // Uniform density: the average over cells is the expectation.
    const long double n = static_cast<long double>(n_points);
    return {static_cast<double>(s1 / n), static_cast<double>(s2 / n), static_cast<double>(sm1 / n),
            static_cast<double>(sm2 / n)};
}

double sample_beta(const BetaDistribution& dist, Rng& rng) {
    if (dist.alpha == 0.0) return dist.beta_bar;
    std::uniform_real_distribution<double> u(dist.lower(), dist.upper());
    return u(rng);
}

EstimationStats mmse_variances(double beta_0, std::span<const double> collider_betas, int tau_p) {
    if (!(beta_0 > 0.0)) throw std::invalid_argument("mmse_variances: beta_0 must be positive");
    if (tau_p < 1) throw std::invalid_argument("mmse_variances: tau_p must be >= 1");
    double group = beta_0;
    for (double b : collider_betas) {
        if (!(b > 0.0)) throw std::invalid_argument("mmse_variances: collider beta must be positive");
        group += b;
    }
    const double tp = tau_p;
    const double var_est = tp * beta_0 * beta_0 / (1.0 + tp * group);
    return {var_est, beta_0 - var_est};
}

}  // namespace mmra
