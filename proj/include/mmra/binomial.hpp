#pragma once

#include <vector>

namespace mmra {

/// Binomial probability mass for r successes in n trials with probability p.
struct BinomialSpec {
    int n = 0;
    int r = 0;
    double p = 0.0;
};

/// Terms whose pmf falls below this are dropped from the activity/collision
/// sums.
inline constexpr double kPmfTruncation = 1e-12;

/// log of the binomial pmf via lgamma. Exact at p = 0 and p = 1 (returns 0 or
/// -inf). Throws std::invalid_argument for an invalid spec.
double binom_log_pmf(const BinomialSpec& spec);

struct BinomialTerm {
    int r;
    double pmf;
};

/// The contiguous run of r around the mode with pmf >= threshold, in
/// increasing r, together with the probability mass it retains.
struct TruncatedBinomial {
    std::vector<BinomialTerm> terms;
    double retained_mass = 0.0;
};

TruncatedBinomial binomial_support(int n, double p, double threshold = kPmfTruncation);

}  // namespace mmra
