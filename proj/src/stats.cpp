#include "couponmix/stats.hpp"

#include <algorithm>
#include <cmath>

#include "couponmix/errors.hpp"

namespace couponmix::stats {

double gumbel_cdf(double y) { return std::exp(-std::exp(-y)); }

KsResult ks_statistic(std::vector<double> samples,
                      const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ConfigError("KS statistic needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const double nd = static_cast<double>(n);

    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, static_cast<double>(i + 1) / nd - f);
        d = std::max(d, f - static_cast<double>(i) / nd);
    }
    return {d, n, 1.36 / std::sqrt(nd)};
}

}  // namespace couponmix::stats
