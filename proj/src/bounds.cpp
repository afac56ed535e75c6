#include "mmra/bounds.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mmra/parallel.hpp"
#include "mmra/random.hpp"

namespace mmra {
namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Expected collider counts below zero make no sense; allow rounding slack
// for p_a built as n / K.
void require_expected_active(const SystemParams& p) {
    if (p.p_a * p.K < 1.0 - 1e-12)
        throw std::invalid_argument("p_a * K must be >= 1 for the averaged bound, got " +
                                    std::to_string(p.p_a * p.K));
}

// Explicit SINR from the group sums. group_sum and group_sq cover {0} u C0.
double sinr1_core(double beta_0, double group_sum, double group_sq, double other_sum, int M, int tau_p) {
    const double tp = tau_p;
    const double m1 = M - 1.0;
    const double collider_sq = group_sq - beta_0 * beta_0;
    // sum_i b_i (1 + tp (S - b_i)) = S + tp (S^2 - sum b_i^2)
    const double estimation = group_sum + tp * (group_sum * group_sum - group_sq);
    const double den = tp * m1 * collider_sq + estimation + (1.0 + other_sum) * (1.0 + tp * group_sum);
    return tp * m1 * beta_0 * beta_0 / den;
}

}  // namespace

void validate(const CollisionScenario& s) {
    if (s.k_active < 1) throw std::invalid_argument("scenario: k_active must be >= 1");
    if (!(s.beta_0 > 0.0)) throw std::invalid_argument("scenario: beta_0 must be positive");
    const auto n = static_cast<int>(s.collider_betas.size() + s.other_betas.size());
    if (n != s.k_active - 1)
        throw std::invalid_argument("scenario: colliders + others must equal k_active - 1, got " +
                                    std::to_string(n) + " for k_active=" + std::to_string(s.k_active));
    for (double b : s.collider_betas)
        if (!(b > 0.0)) throw std::invalid_argument("scenario: collider beta must be positive");
    for (double b : s.other_betas)
        if (!(b > 0.0)) throw std::invalid_argument("scenario: beta must be positive");
}

std::string_view to_string(BoundId id) noexcept {
    switch (id) {
        case BoundId::R1: return "R1";
        case BoundId::R2: return "R2";
        case BoundId::R3: return "R3";
        case BoundId::AsymHeuristic: return "R_asym_heuristic";
    }
    return "?";
}

double prelog(int tau_u, int tau_p) {
    if (tau_u < 1 || tau_p < 0 || tau_p > tau_u) throw std::invalid_argument("prelog: need 0 <= tau_p <= tau_u");
    return static_cast<double>(tau_u - tau_p) / tau_u;
}

double sinr1(const CollisionScenario& s, const SystemParams& p) {
    validate(s);
    if (p.M < 2) throw std::invalid_argument("sinr1: M must be >= 2");
    if (p.tau_p < 1) throw std::invalid_argument("sinr1: tau_p must be >= 1");
    double group_sum = s.beta_0;
    double group_sq = s.beta_0 * s.beta_0;
    for (double b : s.collider_betas) {
        group_sum += b;
        group_sq += b * b;
    }
    return sinr1_core(s.beta_0, group_sum, group_sq, sum(s.other_betas), p.M, p.tau_p);
}

double sinr_from_estimation(double beta_0, double var_est_0, std::span<const double> collider_betas,
                            std::span<const double> group_var_err, double other_beta_sum, int M) {
    const double m1 = M - 1.0;
    double collider_sq = 0.0;
    for (double b : collider_betas) collider_sq += b * b;
    const double b0sq = beta_0 * beta_0;
    const double den = m1 * var_est_0 * collider_sq + b0sq * (sum(group_var_err) + other_beta_sum + 1.0);
    return m1 * var_est_0 * b0sq / den;
}

double sinr1_via_estimation(const CollisionScenario& s, const SystemParams& p) {
    validate(s);
    const auto est0 = mmse_variances(s.beta_0, s.collider_betas, p.tau_p);

    // Group member j's colliders are the rest of the group, terminal 0 included.
    std::vector<double> group{s.beta_0};
    group.insert(group.end(), s.collider_betas.begin(), s.collider_betas.end());
    std::vector<double> errors;
    errors.reserve(group.size());
    std::vector<double> rest;
    for (std::size_t j = 0; j < group.size(); ++j) {
        rest.clear();
        for (std::size_t i = 0; i < group.size(); ++i)
            if (i != j) rest.push_back(group[i]);
        errors.push_back(mmse_variances(group[j], rest, p.tau_p).var_err);
    }
    return sinr_from_estimation(s.beta_0, est0.var_est, s.collider_betas, errors, sum(s.other_betas), p.M);
}

RateReport rate1_mc(const SystemParams& p, const BetaDistribution& dist, std::size_t n_samples,
                    std::uint64_t seed) {
    validate(p);
    validate(dist);
    if (n_samples < 1) throw std::invalid_argument("rate1_mc: n_samples must be >= 1");

    struct Cell {
        int k_active;
        int colliders;
        double mass;     // p(Ka) p(c|Ka)
        std::size_t draws = 0;
        double mean = 0.0;
        double variance = 0.0;  // sample variance of log2(1 + SINR)
    };

    std::vector<Cell> cells;
    double retained = 0.0;
    const auto activity = binomial_support(p.K, p.p_a);
    for (const auto& ka : activity.terms) {
        if (ka.r == 0) {
            retained += ka.pmf;
            continue;
        }
        const auto collisions = binomial_support(ka.r - 1, 1.0 / p.tau_p);
        retained += ka.pmf * collisions.retained_mass;
        for (const auto& c : collisions.terms) cells.push_back({ka.r, c.r, ka.pmf * c.pmf});
    }

    double total_mass = 0.0;
    for (const auto& c : cells) total_mass += c.mass;
    for (auto& c : cells) {
        const auto share = std::llround(static_cast<double>(n_samples) * c.mass / total_mass);
        c.draws = std::max<std::size_t>(2, static_cast<std::size_t>(share));
    }

    parallel_for(cells.size(), [&](std::size_t idx) {
        Cell& cell = cells[idx];
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(cell.k_active), static_cast<std::uint64_t>(cell.colliders));
        const int n_other = cell.k_active - 1 - cell.colliders;
        double mean = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < cell.draws; ++i) {
            const double b0 = sample_beta(dist, rng);
            double group_sum = b0, group_sq = b0 * b0, other_sum = 0.0;
            for (int j = 0; j < cell.colliders; ++j) {
                const double b = sample_beta(dist, rng);
                group_sum += b;
                group_sq += b * b;
            }
            for (int j = 0; j < n_other; ++j) other_sum += sample_beta(dist, rng);
            const double x = std::log2(1.0 + sinr1_core(b0, group_sum, group_sq, other_sum, p.M, p.tau_p));
            // Welford
            const double delta = x - mean;
            mean += delta / static_cast<double>(i + 1);
            m2 += delta * (x - mean);
        }
        cell.mean = mean;
        cell.variance = cell.draws > 1 ? m2 / static_cast<double>(cell.draws - 1) : 0.0;
    });

    const double pre = prelog(p.tau_u, p.tau_p);
    double value = 0.0, var = 0.0;
    std::size_t draws = 0;
    for (const auto& c : cells) {
        const double w = c.mass * c.k_active;
        value += w * c.mean;
        var += w * w * c.variance / static_cast<double>(c.draws);
        draws += c.draws;
    }

    RateReport r;
    r.bound_id = BoundId::R1;
    r.value = pre * value;
    r.std_error = pre * std::sqrt(var);
    r.params = p;
    r.n_samples = draws;
    r.retained_mass = retained;
    return r;
}

double sinr2(int c, int k_active, const SystemParams& p, const BetaMoments& mo) {
    if (k_active < 1 || c < 0 || c > k_active - 1) throw std::invalid_argument("sinr2: need 0 <= c <= Ka - 1");
    if (p.M < 2) throw std::invalid_argument("sinr2: M must be >= 2");
    const double tp = p.tau_p;
    const double m1 = p.M - 1.0;
    const double cc = c;
    const double others = k_active - c - 1.0;
    const double b = mo.mean;
    const double den = tp * m1 * cc * mo.mean_sq * mo.inv_sq_mean
                     + mo.inv_mean * (1.0 + tp * cc * b)
                     + cc * b * (mo.inv_sq_mean + tp * mo.inv_mean + tp * mo.inv_sq_mean * b * (cc - 1.0))
                     + (1.0 + others * b) * (mo.inv_sq_mean + tp * mo.inv_mean + tp * cc * b * mo.inv_sq_mean);
    return tp * m1 / den;
}

RateReport rate2(const SystemParams& p, const BetaMoments& mo) {
    validate(p);
    const double pre = prelog(p.tau_u, p.tau_p);
    double value = 0.0, retained = 0.0;
    const auto activity = binomial_support(p.K, p.p_a);
    for (const auto& ka : activity.terms) {
        if (ka.r == 0) {
            retained += ka.pmf;
            continue;
        }
        const auto collisions = binomial_support(ka.r - 1, 1.0 / p.tau_p);
        retained += ka.pmf * collisions.retained_mass;
        double inner = 0.0;
        for (const auto& c : collisions.terms) inner += c.pmf * std::log2(1.0 + sinr2(c.r, ka.r, p, mo));
        value += ka.pmf * ka.r * inner;
    }
    RateReport r;
    r.bound_id = BoundId::R2;
    r.value = pre * value;
    r.params = p;
    r.retained_mass = retained;
    return r;
}

double sinr3(const SystemParams& p, const BetaMoments& mo) {
    if (p.M < 2) throw std::invalid_argument("sinr3: M must be >= 2");
    if (p.tau_p < 1) throw std::invalid_argument("sinr3: tau_p must be >= 1");
    require_expected_active(p);
    const double tp = p.tau_p;
    const double m1 = p.M - 1.0;
    const double K = p.K;
    const double pak = p.p_a * K;
    const double b = mo.mean;
    const double den = mo.inv_sq_mean
                     + m1 * (pak - 1.0) * mo.mean_sq * mo.inv_sq_mean
                     + 2.0 * (pak - 1.0) * b * mo.inv_sq_mean * (1.0 - b * (1.0 - 1.0 / tp))
                     + b * b * mo.inv_sq_mean * p.p_a * p.p_a * K * (K - 1.0)
                     + (1.0 + (pak - 1.0) * b * mo.inv_mean) * (1.0 + tp);
    return tp * m1 / den;
}

RateReport rate3(const SystemParams& p, const BetaMoments& mo) {
    validate(p);
    RateReport r;
    r.bound_id = BoundId::R3;
    r.value = p.p_a * p.K * prelog(p.tau_u, p.tau_p) * std::log2(1.0 + sinr3(p, mo));
    r.params = p;
    return r;
}

double sinr_asym(double M, double tau_p, double pa_k, const BetaMoments& mo) {
    if (!(M > 0.0 && tau_p > 0.0 && pa_k > 0.0)) throw std::invalid_argument("sinr_asym: M, tau_p, p_a K must be positive");
    const double den = mo.mean_sq * mo.inv_sq_mean * M * pa_k
                     + mo.mean * mo.mean * mo.inv_sq_mean * pa_k * pa_k
                     + mo.mean * mo.inv_mean * pa_k * tau_p;
    return M * tau_p / den;
}

double sinr_asym(const SystemParams& p, const BetaMoments& mo) {
    return sinr_asym(p.M, p.tau_p, p.p_a * p.K, mo);
}

RateReport rate_asym(const SystemParams& p, const BetaMoments& mo) {
    validate(p);
    RateReport r;
    r.bound_id = BoundId::AsymHeuristic;
    r.value = p.p_a * p.K * prelog(p.tau_u, p.tau_p) * std::log2(1.0 + sinr_asym(p, mo));
    r.params = p;
    return r;
}

}  // namespace mmra
