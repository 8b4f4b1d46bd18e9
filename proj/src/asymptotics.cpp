#include "couponmix/asymptotics.hpp"

#include <array>
#include <cmath>

#include "couponmix/exact.hpp"
#include "couponmix/special.hpp"

namespace couponmix::asymptotics {

namespace {

void require_lambda_above_one(const ScalingFamily& f) {
    if (!(f.lambda > 1))
        throw ConfigError(
            "this prediction needs lambda > 1; relabel the groups so the "
            "rarer-coupon group comes first (CLI: --swap-groups)");
}

double bernoulli_even_d(int two_k) {
    static std::vector<Rational> table = bernoulli_numbers(60);
    return rational_to_double(table[two_k]);
}

double harmonic_of(std::int64_t N) { return exact::harmonic(N); }

}  // namespace

std::vector<Rational> bernoulli_numbers(int m_max) {
    if (m_max < 0 || m_max > 60) throw ConfigError("bernoulli_numbers supports 0 <= m <= 60");
    std::vector<Rational> b;
    b.reserve(m_max + 1);
    b.emplace_back(1);
    for (int m = 1; m <= m_max; ++m) {
        // sum_{j<m} C(m+1, j) B_j = -(m+1) B_m
        Rational acc(0);
        mpz_class c;
        for (int j = 0; j < m; ++j) {
            mpz_bin_uiui(c.get_mpz_t(), m + 1, j);
            acc += Rational(c) * b[j];
        }
        b.push_back(-acc / Rational(m + 1));
    }
    return b;
}

double gen_binomial(double r, int k) {
    if (k < 0) throw ConfigError("gen_binomial needs k >= 0");
    double value = 1.0;
    for (int i = 0; i < k; ++i) value *= (r - i) / (i + 1);
    return value;
}

SeriesEvaluation harmonic_asymptotic(std::int64_t N, int order) {
    if (N < 2) throw ConfigError("harmonic_asymptotic needs N >= 2");
    if (order < 0 || order > 29) throw ConfigError("order out of range");
    const double n = static_cast<double>(N);
    double value = std::log(n) + kEulerGamma + 1.0 / (2.0 * n);
    double npow = n * n;
    for (int k = 1; k <= order; ++k) {
        value -= bernoulli_even_d(2 * k) / (2.0 * k * npow);
        npow *= n * n;
    }
    const int k1 = order + 1;
    return {value, std::fabs(bernoulli_even_d(2 * k1) / (2.0 * k1 * npow)), order};
}

SeriesEvaluation basel_tail_asymptotic(std::int64_t N, int order) {
    if (N < 2) throw ConfigError("basel_tail_asymptotic needs N >= 2");
    if (order < 0 || order > 28) throw ConfigError("order out of range");
    const double n = static_cast<double>(N);
    double value = kPiSqOver6 - 1.0 / n + 1.0 / (2.0 * n * n);
    double npow = n * n * n;
    for (int k = 1; k <= order; ++k) {
        value -= bernoulli_even_d(2 * k) / npow;
        npow *= n * n;
    }
    return {value, std::fabs(bernoulli_even_d(2 * (order + 1)) / npow), order};
}

double gamma_derivative_at_one(int k) {
    switch (k) {
        case 0: return 1.0;
        case 1: return -kEulerGamma;
        case 2: return kPiSqOver6 + kEulerGamma * kEulerGamma;
        case 3:
            return -(2.0 * kZeta3 + 3.0 * kPiSqOver6 * kEulerGamma +
                     kEulerGamma * kEulerGamma * kEulerGamma);
        default:
            throw ConfigError("tabulated Gamma derivatives stop at k = 3");
    }
}

double gamma_derivative_at_one_quadrature(int k, const QuadratureSettings& s) {
    if (k < 0 || k > 6) throw ConfigError("quadrature route supports 0 <= k <= 6");
    auto f = [k](double x) {
        double l = std::log(x);
        double p = 1.0;
        for (int i = 0; i < k; ++i) p *= l;
        return std::exp(-x) * p;
    };
    QuadratureSettings local = s;
    local.abs_tol = 0.5 * s.abs_tol;
    local.max_subdivisions = std::max(s.max_subdivisions, 4000);
    // split at the ln x sign change so each piece is one-signed
    double left = integrate_adaptive(f, 0.0, 1.0, local).value;
    double right = integrate_adaptive(f, 1.0, 120.0, local).value;
    return left + right;
}

double uniform_rising_moment_series(std::int64_t N, double r, int n) {
    if (N < 2) throw ConfigError("uniform_rising_moment_series needs N >= 2");
    if (!(r > 0)) throw ConfigError("moment order r must be positive");
    if (n < 0 || n > 6) throw ConfigError("series truncation supports n <= 6");

    static std::array<double, 7> derivs = [] {
        std::array<double, 7> d{};
        for (int k = 0; k <= 3; ++k) d[k] = gamma_derivative_at_one(k);
        for (int k = 4; k <= 6; ++k) d[k] = gamma_derivative_at_one_quadrature(k);
        return d;
    }();

    const double log_n = std::log(static_cast<double>(N));
    double sum = 0.0;
    double lpow = 1.0;
    for (int k = 0; k <= n; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += gen_binomial(r, k) * sign * derivs[k] / lpow;
        lpow *= log_n;
    }
    return std::pow(static_cast<double>(N), r) * std::pow(log_n, r) * sum;
}

double p_first_asymptotic(const ScalingFamily& f) {
    validate_scaling(f);
    require_lambda_above_one(f);
    const double lambda = f.lambda_d();
    return f.nu2 * lanczos_gamma(lambda + 1.0) /
           (std::pow(f.nu1, lambda) * std::pow(static_cast<double>(f.M), lambda - 1.0));
}

double mean_t1_asymptotic(const ScalingFamily& f, Detail detail) {
    validate_scaling(f);
    const double c = f.rate();
    const double m = static_cast<double>(f.M);
    if (detail == Detail::Harmonic) return c * m * harmonic_of(f.nu1 * f.M);
    return c * m * std::log(m) + c * (kEulerGamma + std::log(f.nu1)) * m + c / (2.0 * f.nu1);
}

double mean_t2_asymptotic(const ScalingFamily& f, Detail detail) {
    validate_scaling(f);
    const double c = f.nu1 / f.lambda_d() + f.nu2;
    const double m = static_cast<double>(f.M);
    if (detail == Detail::Harmonic) return c * m * harmonic_of(f.nu2 * f.M);
    return c * m * std::log(m) + c * (kEulerGamma + std::log(f.nu2)) * m + c / (2.0 * f.nu2);
}

ScalePrediction mean_t_asymptotic(const ScalingFamily& f) {
    validate_scaling(f);
    require_lambda_above_one(f);
    const double c = f.rate();
    double value = c * static_cast<double>(f.M) * harmonic_of(f.nu1 * f.M);
    if (f.lambda > 2) {
        value += c / (2.0 * f.nu1);
        return {value, "o(1)"};
    }
    return {value, "O(M^(2-lambda) ln M)"};
}

double var_t1_asymptotic(const ScalingFamily& f, VarDetail detail) {
    validate_scaling(f);
    const double c = f.rate();
    const double m = static_cast<double>(f.M);
    if (detail == VarDetail::Leading) return kPiSqOver6 * c * c * m * m;
    return c * c * exact::inverse_square_sum(f.nu1 * f.M) * m * m -
           c * m * harmonic_of(f.nu1 * f.M);
}

double var_t2_asymptotic(const ScalingFamily& f, VarDetail detail) {
    validate_scaling(f);
    const double c = f.nu1 / f.lambda_d() + f.nu2;
    const double m = static_cast<double>(f.M);
    if (detail == VarDetail::Leading) return kPiSqOver6 * c * c * m * m;
    return c * c * exact::inverse_square_sum(f.nu2 * f.M) * m * m -
           c * m * harmonic_of(f.nu2 * f.M);
}

double var_t_asymptotic(const ScalingFamily& f) {
    validate_scaling(f);
    require_lambda_above_one(f);
    const double c = f.rate();
    const double m = static_cast<double>(f.M);
    return kPiSqOver6 * c * c * m * m;
}

double second_rising_t1_asymptotic(const ScalingFamily& f) {
    validate_scaling(f);
    const double c = f.rate();
    const double m = static_cast<double>(f.M);
    const double h = harmonic_of(f.nu1 * f.M);
    return c * c * m * m * (h * h + exact::inverse_square_sum(f.nu1 * f.M));
}

double second_rising_t2_asymptotic(const ScalingFamily& f) {
    validate_scaling(f);
    const double c = f.nu1 / f.lambda_d() + f.nu2;
    const double m = static_cast<double>(f.M);
    const double h = harmonic_of(f.nu2 * f.M);
    return c * c * m * m * (h * h + exact::inverse_square_sum(f.nu2 * f.M));
}

ScalePrediction second_rising_t_asymptotic(const ScalingFamily& f) {
    validate_scaling(f);
    require_lambda_above_one(f);
    return {second_rising_t1_asymptotic(f), "O(M^(3-lambda+eps))"};
}

double moment_r_leading(const ScalingFamily& f, double r, WhichTime which) {
    validate_scaling(f);
    if (!(r > 0)) throw ConfigError("moment order r must be positive");
    if (which == WhichTime::Total) require_lambda_above_one(f);
    const double c =
        (which == WhichTime::T2) ? (f.nu1 / f.lambda_d() + f.nu2) : f.rate();
    const double m = static_cast<double>(f.M);
    return std::pow(c * m * std::log(m), r);
}

}  // namespace couponmix::asymptotics
