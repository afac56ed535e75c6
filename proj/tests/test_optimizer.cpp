#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <tuple>
#include <vector>

#include "mmra/bounds.hpp"
#include "mmra/optimizer.hpp"

using namespace mmra;

namespace {

const BetaMoments kMo = analytic_moments({10.0, 0.25});

// m^2 E[1/b^2]
double load_constant(const BetaMoments& mo) { return mo.mean * mo.mean * mo.inv_sq_mean; }

}  // namespace

TEST_CASE("s0 root") {
    const double s0 = solve_s0();
    CHECK(std::abs(s0 - 3.92) <= 0.01);
    CHECK(std::abs(s0_residual(s0)) < 1e-10);
    CHECK(solve_s0_newton() == doctest::Approx(s0).epsilon(1e-12));
    // Independent check of the defining equation ln(1 + x) = 2x / (1 + x).
    CHECK(std::log(1.0 + s0) == doctest::Approx(2.0 * s0 / (1.0 + s0)).epsilon(1e-12));
    CHECK(s0 == doctest::Approx(3.9215536345).epsilon(1e-10));
    CHECK_THROWS_AS(solve_s0(0.0), std::invalid_argument);
}

TEST_CASE("heuristic pilot length and load") {
    std::vector<std::pair<int, int>> pts{{60, 16},  {120, 32},  {240, 64}, {300, 100}, {1000, 400},
                                         {100, 100}, {999, 7},   {3, 2},    {4096, 4096}, {500, 1000}};
    const auto ref = heuristic_params(pts[0].first, pts[0].second, 100000, kMo);
    const double ref_ratio = ref.pa_h_times_K / std::sqrt(static_cast<double>(pts[0].first) * pts[0].second);
    for (const auto& [tu, M] : pts) {
        const auto h = heuristic_params(tu, M, 100000, kMo);
        CHECK(h.tau_p_h == tu / 3.0);
        CHECK(h.pa_h_times_K / std::sqrt(static_cast<double>(tu) * M) == doctest::Approx(ref_ratio).epsilon(1e-14));
        CHECK(h.pa_h_times_K ==
              doctest::Approx(std::sqrt(tu * M / (3.0 * h.s0 * load_constant(kMo)))).epsilon(1e-14));
        CHECK_FALSE(h.clamped);
        CHECK(h.rate_h > 0.0);
    }
    // (tau_u = 300, M = 100): tau_p^h = 100
    CHECK(heuristic_params(300, 100, 800, kMo).tau_p_h == 100.0);
    CHECK(heuristic_tau_p(300) == 100);
    CHECK(heuristic_tau_p(100) == 33);
    CHECK(heuristic_tau_p(200) == 67);
    CHECK(heuristic_tau_p(3) == 1);
    CHECK_THROWS_AS(heuristic_params(2, 10, 10, kMo), std::invalid_argument);
}

TEST_CASE("heuristic load clamps at K") {
    const auto h = heuristic_params(1000, 400, 50, kMo);
    CHECK(h.clamped);
    CHECK(h.pa_h == 1.0);
    CHECK(h.pa_h_times_K > 50.0);
    CHECK(h.rate_h == doctest::Approx(50.0 * (2.0 / 3.0) * std::log2(1.0 + h.sinr_h)).epsilon(1e-14));
}

TEST_CASE("heuristic point satisfies both stationarity equations") {
    for (int tu : {60, 300, 1000}) {
        for (int M : {16, 100, 400}) {
            const auto h = heuristic_params(tu, M, 100000, kMo);
            const double x = M * h.tau_p_h / (load_constant(kMo) * h.pa_h_times_K * h.pa_h_times_K);
            const double g = (1.0 + x) / x * std::log(1.0 + x);
            CHECK(std::abs(1.0 + g - tu / h.tau_p_h) < 1e-6);
            CHECK(std::abs(g - 2.0) < 1e-6);
        }
    }
}

TEST_CASE("heuristic maximizes the dominant-term rate") {
    // R(tau_p, x) = x (tau_u - tau_p) / tau_u * log2(1 + M tau_p / (c x^2)) on a dense real grid.
    const int tu = 300, M = 100;
    const double c = load_constant(kMo);
    double best = -1.0, arg_tp = 0.0, arg_x = 0.0;
    for (double tp = 1.0; tp < tu; tp += 0.25) {
        for (double x = 1.0; x < 200.0; x += 0.05) {
            const double r = x * (tu - tp) / tu * std::log2(1.0 + M * tp / (c * x * x));
            if (r > best) {
                best = r;
                arg_tp = tp;
                arg_x = x;
            }
        }
    }
    const auto h = heuristic_params(tu, M, 800, kMo);
    CHECK(std::abs(arg_tp - h.tau_p_h) <= 0.25);
    CHECK(std::abs(arg_x - h.pa_h_times_K) <= 0.05);
}

TEST_CASE("grid search matches brute force") {
    for (const auto& [tu, M, K] : std::vector<std::tuple<int, int, int>>{{20, 8, 15}, {60, 32, 50}, {45, 100, 30}}) {
        double best = -1.0;
        int bt = 0, bx = 0;
        for (int tp = 1; tp < tu; ++tp) {
            for (int x = 1; x <= K; ++x) {
                const double r = rate3({M, K, tu, tp, static_cast<double>(x) / K, std::nullopt}, kMo).value;
                if (r > best) {
                    best = r;
                    bt = tp;
                    bx = x;
                }
            }
        }
        const auto opt = grid_optimize_r3(tu, M, K, kMo);
        CHECK(opt.tau_p_opt == bt);
        CHECK(opt.pa_k_opt == bx);
        CHECK(opt.rate_opt == best);
        CHECK(opt.pa_opt == static_cast<double>(bx) / K);
        CHECK(opt.n_evaluated == static_cast<std::size_t>((tu - 1) * K));
    }
}

TEST_CASE("grid search respects the box") {
    const auto opt = grid_optimize_r3(300, 100, 800, kMo, {50, 60, 10, 20});
    CHECK(opt.tau_p_opt >= 50);
    CHECK(opt.tau_p_opt <= 60);
    CHECK(opt.pa_k_opt >= 10);
    CHECK(opt.pa_k_opt <= 20);
    CHECK(opt.n_evaluated == 11u * 11u);
    CHECK(opt.grid_spec == "tau_p=50..60 pa_K=10..20 step 1");
    CHECK_THROWS_AS(grid_optimize_r3(300, 100, 800, kMo, {60, 50, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(grid_optimize_r3(1, 100, 800, kMo), std::invalid_argument);
}

TEST_CASE("optimum at the reference operating point") {
    const auto opt = grid_optimize_r3(300, 100, 800, kMo);
    CHECK(opt.tau_p_opt == 100);
    CHECK(opt.pa_k_opt == 62);
    const auto h = heuristic_params(300, 100, 800, kMo);
    const double r_heur = rate3({100, 800, 300, heuristic_tau_p(300), h.pa_h, std::nullopt}, kMo).value;
    CHECK(opt.rate_opt >= r_heur);
    CHECK(r_heur / opt.rate_opt >= 0.9);
    CHECK(r_heur / opt.rate_opt == doctest::Approx(0.9903651553).epsilon(1e-8));
}

TEST_CASE("scaling probe") {
    const double s0 = solve_s0();
    const double c = load_constant(kMo);
    const double q = std::sqrt(3.0 * s0 * c);
    const double ln2 = std::log(2.0);
    // Limits of the normalized columns when one term of the SINR denominator dominates.
    const double sinr_many = q / (3.0 * kMo.mean_sq * kMo.inv_sq_mean);
    const double rate_many = (2.0 / 3.0) * sinr_many / (ln2 * q);
    const double sinr_long = q / (kMo.mean * kMo.inv_mean);
    const double rate_long = (2.0 / 3.0) / (ln2 * kMo.mean * kMo.inv_mean);

    SUBCASE("many antennas") {
        const std::vector<std::pair<int, int>> s{{1000, 100}, {10000, 100}, {100000, 100}};
        const auto pts = scaling_probe(ScalingRegime::ManyAntennas, s, 800, kMo);
        REQUIRE(pts.size() == 3);
        CHECK(std::abs(pts[2].sinr_normalized / sinr_many - 1.0) < 0.15);
        CHECK(std::abs(pts[2].rate_normalized / rate_many - 1.0) < 0.15);
        CHECK(std::abs(pts[2].sinr_h / pts[1].sinr_h * std::sqrt(10.0) - 1.0) < 0.15);
        // Each decade of M moves the normalized SINR closer to its limit.
        CHECK(std::abs(pts[2].sinr_normalized - sinr_many) < std::abs(pts[1].sinr_normalized - sinr_many));
        CHECK(std::abs(pts[1].sinr_normalized - sinr_many) < std::abs(pts[0].sinr_normalized - sinr_many));
    }
    SUBCASE("long slots") {
        const std::vector<std::pair<int, int>> s{{100, 1000}, {100, 10000}, {100, 100000}};
        const auto pts = scaling_probe(ScalingRegime::LongSlots, s, 800, kMo);
        CHECK(std::abs(pts[2].sinr_normalized / sinr_long - 1.0) < 0.15);
        CHECK(std::abs(pts[2].rate_normalized / rate_long - 1.0) < 0.15);
        CHECK(std::abs(pts[2].rate_normalized - rate_long) < std::abs(pts[1].rate_normalized - rate_long));
    }
    SUBCASE("balanced") {
        const std::vector<std::pair<int, int>> s{{256, 256}, {1024, 1024}, {4096, 4096}};
        const auto pts = scaling_probe(ScalingRegime::Balanced, s, 800, kMo);
        CHECK(pts[1].sinr_normalized == doctest::Approx(pts[0].sinr_normalized).epsilon(1e-12));
        CHECK(pts[2].sinr_normalized == doctest::Approx(pts[0].sinr_normalized).epsilon(1e-12));
        CHECK(pts[2].rate_h / pts[1].rate_h == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(pts[1].rate_h / pts[0].rate_h == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(pts[2].clamped);
    }
    SUBCASE("rates are positive") {
        const std::vector<std::pair<int, int>> s{{2, 3}, {10, 1000}, {5000, 4}};
        for (auto r : {ScalingRegime::ManyAntennas, ScalingRegime::LongSlots, ScalingRegime::Balanced})
            for (const auto& pt : scaling_probe(r, s, 800, kMo)) CHECK(pt.rate_h > 0.0);
        CHECK(to_string(ScalingRegime::LongSlots) == "long_slots");
    }
}
