#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mmra/bounds.hpp"

using namespace mmra;

namespace {

const BetaDistribution kDist{10.0, 0.25};

SystemParams params(int M, int K, int tau_u, int tau_p, double p_a) { return {M, K, tau_u, tau_p, p_a, std::nullopt}; }

// Independent oracle for the estimation-statistics form of the SINR. The MMSE
// estimate variance of a terminal with coefficient b on a pilot whose users
// sum to g is tau_p b^2 / (1 + tau_p g).
double oracle_sinr_estimation_form(const CollisionScenario& s, int M, int tau_p) {
    double g = s.beta_0;
    for (double b : s.collider_betas) g += b;
    auto est = [&](double b) { return tau_p * b * b / (1.0 + tau_p * g); };
    double err = s.beta_0 - est(s.beta_0);
    double col_sq = 0.0;
    for (double b : s.collider_betas) {
        err += b - est(b);
        col_sq += b * b;
    }
    double others = 0.0;
    for (double b : s.other_betas) others += b;
    const double v0 = est(s.beta_0), b0sq = s.beta_0 * s.beta_0;
    return (M - 1) * v0 * b0sq / ((M - 1) * v0 * col_sq + b0sq * (err + others + 1.0));
}

// Denominator of the moment-averaged SINR (numerator tau_p (M - 1)) as a
// real-valued function of the collider count c so that it can be averaged.
double oracle_averaged_denominator(double c, double ka, int tau_p, int M, const BetaMoments& mo) {
    const double b = mo.mean, i1 = mo.inv_mean, i2 = mo.inv_sq_mean, m2 = mo.mean_sq;
    const double tp = tau_p;
    return tp * (M - 1.0) * c * m2 * i2 + i1 * (1 + tp * c * b) + c * b * (i2 + tp * i1 + tp * i2 * b * (c - 1)) +
           (1 + (ka - c - 1) * b) * (i2 + tp * i1 + tp * c * b * i2);
}

double oracle_single_user_rate(int M, int tau_p, const BetaDistribution& d) {
    auto f = [&](double beta) {
        return std::log2(1.0 + tau_p * (M - 1.0) * beta * beta / (beta + 1.0 + tau_p * beta));
    };
    const int n = 20000;
    const double a = d.lower(), h = (d.upper() - a) / n;
    double s = f(a) + f(d.upper());
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0 / (d.upper() - a);
}

}  // namespace

TEST_CASE("prelog") {
    CHECK(prelog(300, 100) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(prelog(300, 300) == 0.0);
    CHECK(prelog(300, 0) == 1.0);
    CHECK_THROWS_AS(prelog(10, 11), std::invalid_argument);
}

TEST_CASE("sinr1 hand values and limits") {
    CHECK(sinr1({1, 1.0, {}, {}}, params(2, 1, 2, 1, 1.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    // One equal-strength collider: the (M - 1) terms dominate and the SINR tends to 1.
    const double big = sinr1({2, 3.0, {3.0}, {}}, params(1'000'000'000, 2, 10, 5, 1.0));
    CHECK(big == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(sinr1({2, 1.0, {}, {}}, params(2, 2, 10, 5, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(sinr1({1, -1.0, {}, {}}, params(2, 1, 10, 5, 1.0)), std::invalid_argument);
}

TEST_CASE("explicit SINR equals the estimation-statistics form") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> ka_d(1, 40), tp_d(1, 80), m_d(2, 1000);
    std::uniform_real_distribution<double> b_d(0.01, 100.0);
    for (int i = 0; i < 100; ++i) {
        CollisionScenario s;
        s.k_active = ka_d(rng);
        const int c = std::uniform_int_distribution<int>(0, s.k_active - 1)(rng);
        s.beta_0 = b_d(rng);
        for (int j = 0; j < c; ++j) s.collider_betas.push_back(b_d(rng));
        for (int j = c + 1; j < s.k_active; ++j) s.other_betas.push_back(b_d(rng));
        const auto p = params(m_d(rng), s.k_active, 200, tp_d(rng), 1.0);
        const double explicit_form = sinr1(s, p);
        CHECK(explicit_form == doctest::Approx(oracle_sinr_estimation_form(s, p.M, p.tau_p)).epsilon(1e-10));
        CHECK(explicit_form == doctest::Approx(sinr1_via_estimation(s, p)).epsilon(1e-10));
        CHECK(explicit_form > 0.0);
        CHECK(std::isfinite(explicit_form));
    }
}

TEST_CASE("R1 collapses to a closed form for one deterministic terminal") {
    const auto p = params(2, 1, 2, 1, 1.0);
    const BetaDistribution point{10.0, 0.0};
    const auto r = rate1_mc(p, point, 100, 3);
    const double b = 10.0;
    const double expected = 1.0 * 0.5 * std::log2(1.0 + 1.0 * 1.0 * b * b / (b + 1.0 + b));
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-14));
    CHECK(r.std_error == 0.0);
    CHECK(r.bound_id == BoundId::R1);
    CHECK(rate2(p, analytic_moments(point)).value == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("R1 in the collision-free limit") {
    const auto p = params(100, 800, 100, 10, 1e-6);
    const auto r = rate1_mc(p, kDist, 20000, 11);
    const double oracle = 800 * 1e-6 * prelog(100, 10) * oracle_single_user_rate(100, 10, kDist);
    CHECK(std::abs(r.value / oracle - 1.0) < 0.01);
    CHECK(r.retained_mass >= 1.0 - 1e-9);
}

TEST_CASE("R1 is bit-stable for a fixed seed") {
    const auto p = params(32, 50, 60, 10, 0.2);
    const auto a = rate1_mc(p, kDist, 5000, 99);
    const auto b = rate1_mc(p, kDist, 5000, 99);
    const auto c = rate1_mc(p, kDist, 5000, 100);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.value != c.value);
    CHECK(a.n_samples >= 5000u);
}

TEST_CASE("R2 equals R1 exactly for a point-mass distribution") {
    const BetaDistribution point{10.0, 0.0};
    const auto mo = analytic_moments(point);
    for (const auto& p : {params(16, 50, 60, 20, 0.2), params(64, 30, 120, 7, 0.5), params(2, 5, 4, 1, 1.0)}) {
        const auto r1 = rate1_mc(p, point, 1000, 5);
        CHECK(r1.value == doctest::Approx(rate2(p, mo).value).epsilon(1e-12));
        CHECK(r1.std_error == 0.0);
    }
}

TEST_CASE("averaged SINR at a point mass matches the explicit SINR") {
    const double b = 10.0;
    const auto mo = analytic_moments({b, 0.0});
    const auto p = params(50, 30, 100, 8, 0.5);
    for (int ka = 1; ka <= 12; ++ka) {
        for (int c = 0; c < ka; ++c) {
            CollisionScenario s{ka, b, std::vector<double>(static_cast<std::size_t>(c), b),
                                std::vector<double>(static_cast<std::size_t>(ka - 1 - c), b)};
            CHECK(sinr2(c, ka, p, mo) == doctest::Approx(sinr1(s, p)).epsilon(1e-12));
        }
    }
    // c = 0, Ka = 1 multiplied through by beta^2
    const double tp = p.tau_p, m1 = p.M - 1.0;
    CHECK(sinr2(0, 1, p, mo) == doctest::Approx(tp * m1 * b * b / (b + 1.0 + tp * b)).epsilon(1e-13));
}

TEST_CASE("averaged SINR is decreasing in the collider count") {
    const auto mo = analytic_moments(kDist);
    const auto p = params(100, 800, 300, 100, 0.1);
    for (int ka : {2, 10, 60}) {
        for (int c = 1; c < ka; ++c) CHECK(sinr2(c, ka, p, mo) < sinr2(c - 1, ka, p, mo));
    }
    CHECK(sinr2(0, 2, p, mo) > sinr2(1, 2, p, mo));
    CHECK_THROWS_AS(sinr2(2, 2, p, mo), std::invalid_argument);
}

TEST_CASE("R2 and R3 reports") {
    const auto mo = analytic_moments(kDist);
    const auto p = params(100, 800, 300, 100, 62.0 / 800);
    const auto r2 = rate2(p, mo), r3 = rate3(p, mo);
    CHECK(r2.std_error == 0.0);
    CHECK(r3.std_error == 0.0);
    CHECK(r2.retained_mass >= 1.0 - 1e-9);
    CHECK(r2.bound_id == BoundId::R2);
    CHECK(r3.bound_id == BoundId::R3);
    CHECK(r3.value <= r2.value);
    CHECK(rate2(p, mo).value == r2.value);
    CHECK(to_string(BoundId::AsymHeuristic) == "R_asym_heuristic");

    const auto r1 = rate1_mc(p, kDist, 20000, 8);
    CHECK(r2.value <= r1.value + 3.0 * r1.std_error);
    // Frozen regression values.
    CHECK(r3.value == doctest::Approx(27.4296385192).epsilon(1e-9));
}

TEST_CASE("doubling a long pilot costs about the prelog ratio") {
    const auto mo = analytic_moments(kDist);
    const double r20 = rate2(params(64, 50, 200, 20, 0.04), mo).value;
    const double r40 = rate2(params(64, 50, 200, 40, 0.04), mo).value;
    const double prelog_ratio = prelog(200, 40) / prelog(200, 20);
    CHECK(r40 < r20);
    CHECK(r40 / r20 >= prelog_ratio);
    CHECK(r40 / r20 <= prelog_ratio * 1.05);
    CHECK(r20 == doctest::Approx(9.2878366311).epsilon(1e-9));
    CHECK(r40 == doctest::Approx(8.5444217830).epsilon(1e-9));
}

TEST_CASE("sinr3 limits and domain") {
    const auto mo = analytic_moments(kDist);
    const auto p = params(1'000'000'000, 800, 300, 100, 0.05);
    CHECK(sinr3(p, mo) == doctest::Approx(100.0 / ((40.0 - 1.0) * mo.mean_sq * mo.inv_sq_mean)).epsilon(1e-6));
    CHECK_THROWS_AS(sinr3(params(100, 800, 300, 100, 0.5 / 800), mo), std::invalid_argument);
    CHECK_NOTHROW(sinr3(params(100, 800, 300, 100, 1.0 / 800), mo));
}

TEST_CASE("averaged SINR versus the exact expectation of the collider-averaged denominator") {
    // Replacing c by its conditional mean (Ka - 1) / tau_p and averaging over
    // Ka ~ Binom(K, p_a) gives D_exact. sinr3 is tau_p (M - 1) / D with a D
    // that exceeds D_exact by exactly
    //   (1 + tau_p)(1 - E[1/b]) + 2 (p_a K - 1) E[b]^2 E[1/b^2] / tau_p.
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> m_d(2, 500), k_d(20, 400), tp_d(1, 200);
    std::uniform_real_distribution<double> snr_d(0.2, 30.0), a_d(0.0, 0.9), pa_d(0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int K = k_d(rng);
        const auto mo = analytic_moments({snr_d(rng), a_d(rng)});
        const auto p = params(m_d(rng), K, 1000, tp_d(rng), pa_d(rng));
        double d_exact = 0.0, mass = 0.0;
        for (int ka = 0; ka <= K; ++ka) {
            const double w = std::exp(std::lgamma(K + 1.0) - std::lgamma(ka + 1.0) - std::lgamma(K - ka + 1.0) +
                                      ka * std::log(p.p_a) + (K - ka) * std::log1p(-p.p_a));
            d_exact += w * oracle_averaged_denominator((ka - 1.0) / p.tau_p, ka, p.tau_p, p.M, mo);
            mass += w;
        }
        REQUIRE(mass == doctest::Approx(1.0).epsilon(1e-10));
        const double d_impl = p.tau_p * (p.M - 1.0) / sinr3(p, mo);
        const double pak = p.p_a * K;
        const double gap = (1.0 + p.tau_p) * (1.0 - mo.inv_mean) +
                           2.0 * (pak - 1.0) * mo.mean * mo.mean * mo.inv_sq_mean / p.tau_p;
        CHECK(d_impl - d_exact == doctest::Approx(gap).epsilon(1e-10).scale(d_impl));
    }
}

TEST_CASE("R3 over tau_p peaks at a single interior point") {
    const auto mo = analytic_moments(kDist);
    double best = -1.0;
    int arg = 0;
    std::vector<double> r;
    for (int tp = 1; tp < 300; ++tp) {
        r.push_back(rate3(params(100, 800, 300, tp, 62.0 / 800), mo).value);
        if (r.back() > best) {
            best = r.back();
            arg = tp;
        }
    }
    CHECK(arg == 100);
    // Increasing before the peak and decreasing after it.
    for (int tp = 2; tp <= arg; ++tp) CHECK(r[tp - 1] > r[tp - 2]);
    for (int tp = arg + 1; tp < 300; ++tp) CHECK(r[tp - 1] < r[tp - 2]);
}

TEST_CASE("large-system SINR") {
    const auto mo = analytic_moments(kDist);
    SUBCASE("agrees with sinr3 in the large regime") {
        double worst = 0.0;
        for (int M : {100, 200, 400, 1000})
            for (int tu : {100, 200, 400, 700, 1000})
                for (int tp = 30; tp < tu; tp += 7)
                    for (int x = 30; x <= 800; x += 11) {
                        const auto p = params(M, 800, tu, tp, x / 800.0);
                        worst = std::max(worst, std::abs(sinr_asym(p, mo) / sinr3(p, mo) - 1.0));
                    }
        // Measured 0.0322 at M = 1000, tau_p = 30, p_a K = 30.
        CHECK(worst < 0.04);
    }
    SUBCASE("point mass satisfies the unit moment-product condition") {
        const auto pm = analytic_moments({10.0, 0.0});
        CHECK(pm.mean * pm.mean * pm.inv_sq_mean == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("strictly decreasing in the load") {
        double prev = sinr_asym(100.0, 100.0, 1.0, mo);
        for (double x = 2.0; x < 800.0; x += 1.0) {
            const double s = sinr_asym(100.0, 100.0, x, mo);
            CHECK(s < prev);
            prev = s;
        }
    }
    SUBCASE("rate uses the same prelog and load") {
        const auto p = params(100, 800, 300, 100, 0.05);
        CHECK(rate_asym(p, mo).value ==
              doctest::Approx(40.0 * (2.0 / 3.0) * std::log2(1.0 + sinr_asym(p, mo))).epsilon(1e-14));
        CHECK_THROWS_AS(sinr_asym(0.0, 1.0, 1.0, mo), std::invalid_argument);
    }
}
