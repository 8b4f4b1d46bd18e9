#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace couponmix::stats {

// Standard Gumbel CDF exp(-e^(-y)).
double gumbel_cdf(double y);

struct KsResult {
    double d = 0.0;
    std::size_t n = 0;
    double critical_05 = 0.0;  // asymptotic 5% value 1.36 / sqrt(n)
};

// Two-sided one-sample Kolmogorov-Smirnov statistic against a continuous CDF.
KsResult ks_statistic(std::vector<double> samples,
                      const std::function<double(double)>& cdf);

}  // namespace couponmix::stats
