#pragma once

#include <functional>
#include <span>

namespace thermo {

struct KsResult {
    double statistic = 0.0;  // sup |F_a - F_b|
    double p_value = 1.0;
    std::size_t effective_n = 0;
};

/// Complementary CDF of the Kolmogorov distribution, Q(lambda).
double kolmogorov_survival(double lambda);

/// One-sample test of `samples` against a continuous CDF. The asymptotic
/// p-value uses Stephens' small-sample correction.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample test; n_eff = n m / (n + m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace thermo
