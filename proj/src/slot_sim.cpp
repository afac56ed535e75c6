#include "mmra/slot_sim.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mmra/binomial.hpp"
#include "mmra/bounds.hpp"
#include "mmra/parallel.hpp"

namespace mmra {
namespace {

constexpr std::size_t kSlotsPerBatch = 1024;

void validate_for_simulation(const SystemParams& p) {
    if (p.M < 2) throw std::invalid_argument("simulation: M must be >= 2");
    if (p.K < 1) throw std::invalid_argument("simulation: K must be >= 1");
    if (p.tau_p < 1 || p.tau_p >= p.tau_u) throw std::invalid_argument("simulation: need 1 <= tau_p < tau_u");
    if (!(p.p_a >= 0.0 && p.p_a <= 1.0)) throw std::invalid_argument("simulation: p_a must lie in [0, 1]");
}

void draw_cn(CVector& v, double variance, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * variance));
    for (auto& x : v) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        x = {re, im};
    }
}

double norm_sq(const CVector& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s;
}

std::complex<double> inner(const CVector& a, const CVector& b) {
    std::complex<double> s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

struct Access {
    std::vector<bool> flags;
    std::vector<int> ids;
    std::vector<int> pilots;
};

// Activity then pilot choice; simulate_slot and access_statistics share this
// so the histograms describe exactly what the simulator draws.
Access draw_access(const SystemParams& p, Rng& rng) {
    Access a;
    a.flags.assign(static_cast<std::size_t>(p.K), false);
    std::bernoulli_distribution active(p.p_a);
    for (int k = 0; k < p.K; ++k) {
        if (active(rng)) {
            a.flags[static_cast<std::size_t>(k)] = true;
            a.ids.push_back(k);
        }
    }
    std::uniform_int_distribution<int> pick(0, p.tau_p - 1);
    a.pilots.reserve(a.ids.size());
    for (std::size_t i = 0; i < a.ids.size(); ++i) a.pilots.push_back(pick(rng));
    return a;
}

}  // namespace

double mmse_gain(double beta, double group_beta, int tau_p) noexcept {
    return std::sqrt(static_cast<double>(tau_p)) * beta / (1.0 + tau_p * group_beta);
}

SlotRealization simulate_slot(const SystemParams& p, const BetaDistribution& dist, Rng& rng) {
    validate_for_simulation(p);
    validate(dist);

    Access access = draw_access(p, rng);
    SlotRealization s;
    s.active_flags = std::move(access.flags);
    s.active_ids = std::move(access.ids);
    s.pilot_index = std::move(access.pilots);
    const std::size_t n = s.active_ids.size();
    const auto M = static_cast<std::size_t>(p.M);

    s.betas.resize(n);
    s.channels.assign(n, CVector(M));
    for (std::size_t i = 0; i < n; ++i) {
        s.betas[i] = sample_beta(dist, rng);
        draw_cn(s.channels[i], s.betas[i], rng);
    }

    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(p.tau_p));
    for (std::size_t i = 0; i < n; ++i) groups[static_cast<std::size_t>(s.pilot_index[i])].push_back(i);

    const double sqrt_tp = std::sqrt(static_cast<double>(p.tau_p));
    const double total_beta = std::accumulate(s.betas.begin(), s.betas.end(), 0.0);
    std::vector<double> group_beta(groups.size(), 0.0);
    s.estimates.assign(n, CVector(M));
    s.estimation.resize(n);
    CVector y(M);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) continue;
        draw_cn(y, 1.0, rng);
        for (std::size_t j : groups[g]) {
            group_beta[g] += s.betas[j];
            for (std::size_t m = 0; m < M; ++m) y[m] += sqrt_tp * s.channels[j][m];
        }
        // E|y_m|^2 = 1 + tau_p * group_beta
        const double y_power = 1.0 + p.tau_p * group_beta[g];
        for (std::size_t j : groups[g]) {
            const double gain = mmse_gain(s.betas[j], group_beta[g], p.tau_p);
            for (std::size_t m = 0; m < M; ++m) s.estimates[j][m] = gain * y[m];
            const double var_est = gain * gain * y_power;
            s.estimation[j] = {var_est, s.betas[j] - var_est};
        }
    }

    s.collider_count.resize(n);
    s.effective_sinr.resize(n);
    s.conditional_sinr.resize(n);
    std::vector<double> collider_betas, group_err;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& group = groups[static_cast<std::size_t>(s.pilot_index[k])];
        collider_betas.clear();
        group_err.clear();
        double cross = 0.0;
        const double own = norm_sq(s.estimates[k]);
        for (std::size_t j : group) {
            group_err.push_back(s.estimation[j].var_err);
            if (j == k) continue;
            collider_betas.push_back(s.betas[j]);
            cross += std::norm(inner(s.estimates[k], s.estimates[j]));
        }
        const double err_sum = std::accumulate(group_err.begin(), group_err.end(), 0.0);
        const double others = total_beta - group_beta[static_cast<std::size_t>(s.pilot_index[k])];
        s.collider_count[k] = static_cast<int>(collider_betas.size());
        s.effective_sinr[k] =
            sinr_from_estimation(s.betas[k], s.estimation[k].var_est, collider_betas, group_err, others, p.M);
        s.conditional_sinr[k] = own * own / (cross + own * (err_sum + others + 1.0));
    }
    return s;
}

EmpiricalRate empirical_rate(const SystemParams& p, const BetaDistribution& dist, std::size_t n_slots,
                             std::uint64_t seed) {
    validate_for_simulation(p);
    validate(dist);
    if (n_slots < 1) throw std::invalid_argument("empirical_rate: n_slots must be >= 1");

    const double pre = prelog(p.tau_u, p.tau_p);
    const std::size_t batches = (n_slots + kSlotsPerBatch - 1) / kSlotsPerBatch;
    std::vector<RunningStats> eff(batches), cond(batches);
    parallel_for(batches, [&](std::size_t b) {
        Rng rng = make_rng(seed, b, 0x510751075ULL);
        const std::size_t count = std::min(kSlotsPerBatch, n_slots - b * kSlotsPerBatch);
        for (std::size_t i = 0; i < count; ++i) {
            const SlotRealization s = simulate_slot(p, dist, rng);
            double r_eff = 0.0, r_cond = 0.0;
            for (std::size_t k = 0; k < s.effective_sinr.size(); ++k) {
                r_eff += pre * std::log2(1.0 + s.effective_sinr[k]);
                r_cond += pre * std::log2(1.0 + s.conditional_sinr[k]);
            }
            eff[b].add(r_eff);
            cond[b].add(r_cond);
        }
    });

    RunningStats total_eff, total_cond;
    for (std::size_t b = 0; b < batches; ++b) {
        total_eff.merge(eff[b]);
        total_cond.merge(cond[b]);
    }
    return {total_eff.mean(), total_eff.std_error(), n_slots, total_cond.mean(), total_cond.std_error()};
}

double channel_hardening_stat(int M, double beta, std::size_t n_samples, std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("channel_hardening_stat: M must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("channel_hardening_stat: beta must be positive");
    if (n_samples < 2) throw std::invalid_argument("channel_hardening_stat: n_samples must be >= 2");
    Rng rng = make_rng(seed, 0x4a4d);
    CVector h(static_cast<std::size_t>(M));
    RunningStats st;
    for (std::size_t i = 0; i < n_samples; ++i) {
        draw_cn(h, beta, rng);
        st.add(norm_sq(h) / (M * beta));
    }
    return std::sqrt(st.variance()) / st.mean();
}

EmpiricalEstimation empirical_estimation_stats(double beta_0, std::span<const double> collider_betas, int tau_p,
                                               std::size_t n_realizations, std::uint64_t seed) {
    // Validates the inputs through the analytic route as well.
    (void)mmse_variances(beta_0, collider_betas, tau_p);
    if (n_realizations < 2) throw std::invalid_argument("empirical_estimation_stats: need >= 2 realizations");

    const double group = beta_0 + std::accumulate(collider_betas.begin(), collider_betas.end(), 0.0);
    const double gain = mmse_gain(beta_0, group, tau_p);
    const double sqrt_tp = std::sqrt(static_cast<double>(tau_p));
    Rng rng = make_rng(seed, 0xe57);
    CVector h0(1), hj(1), noise(1);
    double s_est = 0.0, s_err = 0.0;
    std::complex<double> s_cross{};
    for (std::size_t i = 0; i < n_realizations; ++i) {
        draw_cn(h0, beta_0, rng);
        std::complex<double> y = sqrt_tp * h0[0];
        for (double b : collider_betas) {
            draw_cn(hj, b, rng);
            y += sqrt_tp * hj[0];
        }
        draw_cn(noise, 1.0, rng);
        y += noise[0];
        const std::complex<double> est = gain * y;
        const std::complex<double> err = h0[0] - est;
        s_est += std::norm(est);
        s_err += std::norm(err);
        s_cross += std::conj(est) * err;
    }
    const double n = static_cast<double>(n_realizations);
    EmpiricalEstimation out;
    out.var_est = s_est / n;
    out.var_err = s_err / n;
    out.correlation = std::abs(s_cross / n) / std::sqrt(out.var_est * out.var_err);
    out.n = n_realizations;
    return out;
}

AccessStatistics access_statistics(const SystemParams& p, std::size_t n_slots, std::uint64_t seed) {
    validate_for_simulation(p);
    AccessStatistics st;
    st.n_slots = n_slots;
    st.active_hist.assign(static_cast<std::size_t>(p.K) + 1, 0.0);
    st.pilot_hist.assign(static_cast<std::size_t>(p.tau_p), 0.0);
    st.collider_hist.resize(static_cast<std::size_t>(p.K) + 1);
    for (int ka = 1; ka <= p.K; ++ka) st.collider_hist[static_cast<std::size_t>(ka)].assign(static_cast<std::size_t>(ka), 0.0);

    Rng rng = make_rng(seed, 0xacce55);
    for (std::size_t s = 0; s < n_slots; ++s) {
        const Access a = draw_access(p, rng);
        const std::size_t ka = a.ids.size();
        st.active_hist[ka] += 1.0;
        for (int pilot : a.pilots) st.pilot_hist[static_cast<std::size_t>(pilot)] += 1.0;
        if (ka == 0) continue;
        int colliders = 0;
        for (std::size_t i = 1; i < ka; ++i) colliders += a.pilots[i] == a.pilots[0];
        st.collider_hist[ka][static_cast<std::size_t>(colliders)] += 1.0;
    }
    return st;
}

ChiSquareResult activity_gof(const AccessStatistics& st, const SystemParams& p) {
    std::vector<double> expected(st.active_hist.size());
    for (int ka = 0; ka <= p.K; ++ka)
        expected[static_cast<std::size_t>(ka)] =
            static_cast<double>(st.n_slots) * std::exp(binom_log_pmf({p.K, ka, p.p_a}));
    return chi_square_gof(st.active_hist, expected);
}

ChiSquareResult pilot_gof(const AccessStatistics& st, const SystemParams& p) {
    const double total = std::accumulate(st.pilot_hist.begin(), st.pilot_hist.end(), 0.0);
    std::vector<double> expected(st.pilot_hist.size(), total / p.tau_p);
    return chi_square_gof(st.pilot_hist, expected);
}

ChiSquareResult collision_gof(const AccessStatistics& st, const SystemParams& p) {
    ChiSquareResult total;
    total.statistic = 0.0;
    for (int ka = 1; ka <= p.K; ++ka) {
        const auto& obs = st.collider_hist[static_cast<std::size_t>(ka)];
        const double n = std::accumulate(obs.begin(), obs.end(), 0.0);
        if (n == 0.0) continue;
        std::vector<double> expected(obs.size());
        for (int c = 0; c < ka; ++c)
            expected[static_cast<std::size_t>(c)] = n * std::exp(binom_log_pmf({ka - 1, c, 1.0 / p.tau_p}));
        const auto r = chi_square_gof(obs, expected);
        total.statistic += r.statistic;
        total.dof += r.dof;
        total.bins += r.bins;
    }
    total.p_value = chi_square_sf(total.statistic, total.dof);
    return total;
}

}  // namespace mmra
