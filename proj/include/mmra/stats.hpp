#pragma once

#include <cstddef>
#include <span>

namespace mmra {

/// Running mean and variance (Welford). merge() combines two accumulators
/// exactly, so per-batch accumulators can be reduced in batch order.
class RunningStats {
public:
    void add(double x) noexcept;
    void merge(const RunningStats& other) noexcept;

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept;  ///< unbiased sample variance
    double std_error() const noexcept; ///< sqrt(variance / n)

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int bins = 0;  ///< after pooling
};

/// Pearson goodness-of-fit of observed counts against expected counts.
/// Adjacent bins are pooled left to right until each pooled bin expects at
/// least min_expected; a short final remainder is folded into the last bin.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               double min_expected = 5.0);

/// Upper-tail probability of a chi-square statistic.
double chi_square_sf(double statistic, int dof);

}  // namespace mmra
