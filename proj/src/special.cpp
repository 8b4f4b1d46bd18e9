#include "couponmix/special.hpp"

#include <cmath>

#include "couponmix/errors.hpp"

namespace couponmix {

namespace {

// Godfrey's coefficients for g = 7.
constexpr double kCoef[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kSqrtTwoPi = 2.5066282746310005024;

double lanczos_series(double z) {
    double x = kCoef[0];
    for (int i = 1; i < 9; ++i) x += kCoef[i] / (z + i);
    return x;
}

}  // namespace

double lanczos_gamma(double x) {
    if (!(x > 0)) throw ConfigError("lanczos_gamma requires x > 0");
    if (x < 0.5) {
        // reflection keeps the series argument >= 0.5
        return M_PI / (std::sin(M_PI * x) * lanczos_gamma(1.0 - x));
    }
    double z = x - 1.0;
    double t = z + 7.5;
    return kSqrtTwoPi * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_series(z);
}

double lanczos_lgamma(double x) {
    if (!(x > 0)) throw ConfigError("lanczos_lgamma requires x > 0");
    if (x < 0.5) return std::log(M_PI / std::sin(M_PI * x)) - lanczos_lgamma(1.0 - x);
    double z = x - 1.0;
    double t = z + 7.5;
    return std::log(kSqrtTwoPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_series(z));
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) throw ConfigError("log_binomial requires 0 <= k <= n");
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace couponmix
