#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "couponmix/model.hpp"
#include "couponmix/quadrature.hpp"
#include "couponmix/rational.hpp"

namespace couponmix::exact {

enum class EvalMode { Rational, CompensatedFloat, Auto };

struct SumSettings {
    // Term count ceiling for the exact alternating sum (auto mode policy).
    std::int64_t max_rational_terms = 10'000'000;
    // Auto mode refuses when cancellation_ratio * eps exceeds this.
    double cancellation_limit = 1e-6;
    // Lattice memory ceiling for the difference-equation fallback.
    std::size_t dp_memory_budget = std::size_t{2} << 30;
};

struct FirstDetectionResult {
    double value = 0.0;
    std::optional<Rational> exact;   // present when evaluated in rational mode
    double cancellation_ratio = 1.0; // sum|term| / |result| for the float sum
    std::string route;               // "sum-rational", "sum-float", "dp-float", "integral"
};

// P{group l is detected first} by the g-fold alternating sum, exact in
// rational mode. Group indices are 1-based. Auto mode picks the exact sum
// when it is cheap, falls back to the compensated float sum, and escalates
// to the (cancellation-free) lattice recursion or the two-group integral
// when the float sum's cancellation estimate is past the reliability limit.
FirstDetectionResult first_detection_prob_sum(const GroupMixture& m, int group,
                                              EvalMode mode = EvalMode::Auto,
                                              const SumSettings& settings = {});

// Independent route: solves the first-order lattice recursion
//   v(n) = sum_j p_j n_j v(n - e_j) / sum_j p_j n_j
// over 0 <= n_j <= M_j with v = 1 on the face n_l = 0 and v = 0 on the other
// faces, returning v(M_1, ..., M_g).
Rational first_detection_prob_dp(const GroupMixture& m, int group,
                                 std::size_t memory_budget = std::size_t{2} << 30);
double first_detection_prob_dp_float(const GroupMixture& m, int group,
                                     std::size_t memory_budget = std::size_t{2} << 30);

struct CompensatedValue {
    double value = 0.0;
    double abs_sum = 0.0;  // sum of |term|
    double cancellation_ratio() const;
};

// Float alternating sum in log space with sign tracking; the OpenMP kernel
// reduces fixed-size index chunks so the result does not depend on the
// thread count. The serial variant is the reference implementation.
CompensatedValue first_detection_sum_float(const GroupMixture& m, int group);
CompensatedValue first_detection_sum_float_serial(const GroupMixture& m, int group);

// The four equivalent integral representations of P{T_1 < T_2} for g = 2.
//   Direct      x in (0,1), explicit p1/p2 powers
//   Ratio       x in (0,1), depends only on lambda = p2/p1 and (M1, M2)
//   RatioRoot   x in (0,1), the x^(1/lambda) variant of the same
//   Exponential t in (0,inf), the x = e^(-t) substitution
enum class IntegralForm { Direct, Ratio, RatioRoot, Exponential };

IntegralForm integral_form_from_string(const std::string& name);
std::string integral_form_name(IntegralForm form);

// P{T_1 < T_2} for a two-group mixture by adaptive quadrature of the chosen
// form. When lambda < 1 the labels are swapped internally and the complement
// is returned, so the evaluated integrand always has lambda >= 1.
double p_t1_before_t2_integral(const GroupMixture& m, IntegralForm form,
                               const QuadratureSettings& s = {});

// Unconstrained variant: the pair (p1, p2) need not close a unit-mass pool;
// the probability depends on it only through the ratio p2/p1.
double p_t1_before_t2_integral_raw(double p1, double p2, std::int64_t M1, std::int64_t M2,
                                   IntegralForm form, const QuadratureSettings& s = {});

struct RisingMomentQuery {
    std::vector<double> q;  // per-coupon probabilities, sum to 1 within 1e-12
    double r = 1.0;         // moment order, > 0
};

// E[S^(r)] = r * int t^(r-1) [1 - prod_j (1 - e^(-q_j t))] dt with an
// analytic tail cutoff (incomplete-gamma bound) and adaptive quadrature.
double rising_moment(const RisingMomentQuery& query, const QuadratureSettings& s = {});

// Same expectation by the inclusion-exclusion sum over nonempty subsets,
// Gamma(r+1) * sum (-1)^(|J|-1) / (sum_{j in J} q_j)^r. N <= 25.
double rising_moment_subset_sum(const RisingMomentQuery& query);
double rising_moment_subset_sum_serial(const RisingMomentQuery& query);

// Exact value of the subset sum for integer r and rational probabilities.
Rational rising_moment_subset_sum_exact(const std::vector<Rational>& q, int r);

// Harmonic numbers; the exact form is limited to N <= 10^4.
double harmonic(std::int64_t N);
Rational harmonic_exact(std::int64_t N);

// sum_{j<=N} 1/j^2 by direct summation (switches to the tail expansion for
// very large N).
double inverse_square_sum(std::int64_t N);

// Uniform-pool closed forms: E[S_N] = N H_N and E[S_N^(2)] = N^2 (H_N^2 +
// sum_{j<=N} 1/j^2).
double uniform_mean(std::int64_t N);
double uniform_second_rising(std::int64_t N);

// E[S(theta)] = N H_N / (1 - theta) + J2, with the exponentially small J2
// term evaluated by quadrature rather than dropped.
double theta_mean_exact(const ThetaExample& x, const QuadratureSettings& s = {});

// E[T^(r)] for the total collection time of the mixture; the product over
// coupons is grouped as prod_j (1 - e^(-p_j t))^(M_j).
double mixture_moment(const GroupMixture& m, double r, const QuadratureSettings& s = {});

// E[T_j^(r)] for a single group's detection time (1-based index), same
// integral restricted to that group's coupons.
double group_detection_moment(const GroupMixture& m, int group, double r,
                              const QuadratureSettings& s = {});

// Binomial inclusion-exclusion route for the same single-group moment.
double group_detection_moment_subset(const GroupMixture& m, int group, double r);

}  // namespace couponmix::exact
