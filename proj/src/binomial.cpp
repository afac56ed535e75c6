#include "mmra/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmra {

double binom_log_pmf(const BinomialSpec& s) {
    if (s.n < 0 || s.r < 0 || s.r > s.n) throw std::invalid_argument("binom_log_pmf: need 0 <= r <= n");
    if (!(s.p >= 0.0 && s.p <= 1.0)) throw std::invalid_argument("binom_log_pmf: need 0 <= p <= 1");

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (s.p == 0.0) return s.r == 0 ? 0.0 : neg_inf;
    if (s.p == 1.0) return s.r == s.n ? 0.0 : neg_inf;

    const double log_choose = std::lgamma(s.n + 1.0) - std::lgamma(s.r + 1.0) - std::lgamma(s.n - s.r + 1.0);
    return log_choose + s.r * std::log(s.p) + (s.n - s.r) * std::log1p(-s.p);
}

TruncatedBinomial binomial_support(int n, double p, double threshold) {
    if (n < 0) throw std::invalid_argument("binomial_support: n must be >= 0");
    auto pmf = [&](int r) { return std::exp(binom_log_pmf({n, r, p})); };

    // The pmf is unimodal, so walking outward from the mode until it drops
    // below the threshold finds every retained term.
    const int mode = std::clamp(static_cast<int>(std::floor((n + 1) * p)), 0, n);
    TruncatedBinomial out;
    std::vector<BinomialTerm> below;
    for (int r = mode - 1; r >= 0; --r) {
        const double v = pmf(r);
        if (v < threshold) break;
        below.push_back({r, v});
    }
    out.terms.assign(below.rbegin(), below.rend());
    for (int r = mode; r <= n; ++r) {
        const double v = pmf(r);
        if (v < threshold) break;
        out.terms.push_back({r, v});
    }
    for (const auto& t : out.terms) out.retained_mass += t.pmf;
    return out;
}

}  // namespace mmra
