#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "couponmix/model.hpp"
#include "couponmix/quadrature.hpp"
#include "couponmix/rational.hpp"

namespace couponmix::asymptotics {

// B_0 .. B_m_max with B_1 = -1/2 (the generating-function convention where
// the expansion of z/(e^z - 1) carries B_1 z); only even indices matter for
// the series below. m_max <= 60.
std::vector<Rational> bernoulli_numbers(int m_max);

// Generalized binomial coefficient r(r-1)...(r-k+1)/k!, 1 when k = 0.
double gen_binomial(double r, int k);

// Truncations of (possibly divergent) asymptotic series report the magnitude
// of the first omitted term as the error proxy.
struct SeriesEvaluation {
    double value = 0.0;
    double first_omitted = 0.0;
    int order = 0;
};

// H_N ~ ln N + gamma + 1/(2N) - sum_{k>=1} B_2k / (2k N^2k); `order` counts
// the Bernoulli correction terms kept.
SeriesEvaluation harmonic_asymptotic(std::int64_t N, int order);

// sum_{j<=N} 1/j^2 ~ pi^2/6 - 1/N + 1/(2N^2) - sum_{k>=1} B_2k / N^(2k+1).
SeriesEvaluation basel_tail_asymptotic(std::int64_t N, int order);

// The k-th derivative of Gamma at 1, from the fixed table for k <= 3.
double gamma_derivative_at_one(int k);

// Independent route for the same values: adaptive quadrature of
// int_0^inf e^(-x) ln^k x dx. Supports k <= 6.
double gamma_derivative_at_one_quadrature(int k, const QuadratureSettings& s = {});

// Uniform-pool rising-moment series: N^r (ln N)^r * sum_{k<=n} C(r,k) (-1)^k
// Gamma^(k)(1) / ln^k N. Derivative values beyond the table come from the
// quadrature route; n <= 6.
double uniform_rising_moment_series(std::int64_t N, double r, int n);

// First-detection probability decay nu2 Gamma(lambda+1) / (nu1^lambda
// M^(lambda-1)); requires lambda > 1.
double p_first_asymptotic(const ScalingFamily& f);

enum class Detail { Harmonic, Expanded };

// E[T_1]: harmonic detail (nu1 + lambda nu2) M H_{nu1 M}; expanded detail
// spells out the M ln M, M, and constant terms.
double mean_t1_asymptotic(const ScalingFamily& f, Detail detail);
double mean_t2_asymptotic(const ScalingFamily& f, Detail detail);

struct ScalePrediction {
    double value = 0.0;
    std::string error_order;
};

// E[T] for lambda > 1; the constant refinement applies for lambda > 2.
ScalePrediction mean_t_asymptotic(const ScalingFamily& f);

enum class VarDetail { Full, Leading };

double var_t1_asymptotic(const ScalingFamily& f, VarDetail detail);
double var_t2_asymptotic(const ScalingFamily& f, VarDetail detail);

// V[T] ~ pi^2 (nu1 + lambda nu2)^2 M^2 / 6 for lambda > 1.
double var_t_asymptotic(const ScalingFamily& f);

// E[T_j (T_j + 1)] second rising moments.
double second_rising_t1_asymptotic(const ScalingFamily& f);
double second_rising_t2_asymptotic(const ScalingFamily& f);

// E[T (T + 1)] for lambda > 1, with the reported error order.
ScalePrediction second_rising_t_asymptotic(const ScalingFamily& f);

enum class WhichTime { T1, T2, Total };

// Leading order c^r M^r ln^r M, c = nu1 + lambda nu2 for T1 and T (T needs
// lambda > 1), c = nu1/lambda + nu2 for T2.
double moment_r_leading(const ScalingFamily& f, double r, WhichTime which);

}  // namespace couponmix::asymptotics
