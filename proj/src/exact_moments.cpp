#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "couponmix/exact.hpp"
#include "couponmix/special.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace couponmix::exact {

namespace {

struct Neumaier {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// A pool of uniform groups given as (probability, multiplicity) pairs; the
// per-coupon and per-group moment integrals differ only in this list.
struct GroupedPool {
    std::vector<double> p;
    std::vector<double> mult;
};

// 1 - prod_j (1 - e^(-p_j t))^(M_j), evaluated through the complement so the
// large-t regime does not cancel.
double complement_cdf(double t, const GroupedPool& pool) {
    double s = 0.0;
    for (std::size_t j = 0; j < pool.p.size(); ++j)
        s += pool.mult[j] * std::log1p(-std::exp(-pool.p[j] * t));
    return -std::expm1(s);
}

// Cutoff T with r * int_T^inf t^(r-1) sum_j M_j e^(-p_j t) dt < half_tol,
// using Gamma(r, x) <= 2 x^(r-1) e^(-x) for x >= 2 max(1, r-1).
double tail_cutoff(const GroupedPool& pool, double r, double half_tol) {
    double p_min = *std::min_element(pool.p.begin(), pool.p.end());
    double t = 2.0 * std::max(1.0, r - 1.0) / p_min + 1.0;
    auto bound = [&](double T) {
        double b = 0.0;
        for (std::size_t j = 0; j < pool.p.size(); ++j) {
            double x = pool.p[j] * T;
            b += pool.mult[j] * r * std::pow(pool.p[j], -r) * 2.0 *
                 std::pow(x, r - 1.0) * std::exp(-x);
        }
        return b;
    };
    for (int i = 0; i < 500 && bound(t) > half_tol; ++i) t *= 1.5;
    return t;
}

double pool_rising_moment(const GroupedPool& pool, double r, const QuadratureSettings& s) {
    if (!(r > 0)) throw ConfigError("moment order r must be positive");
    const double t_hi = tail_cutoff(pool, r, 0.5 * std::max(s.abs_tol, 1e-300));
    auto f = [&](double t) { return r * std::pow(t, r - 1.0) * complement_cdf(t, pool); };
    std::vector<double> breaks;
    for (int k = 14; k >= 1; --k) breaks.push_back(t_hi * std::ldexp(1.0, -k));
    QuadratureSettings local = s;
    local.abs_tol = 0.5 * s.abs_tol;
    return integrate_adaptive(f, 0.0, t_hi, local, breaks).value;
}

GroupedPool pool_from_mixture(const GroupMixture& m) {
    GroupedPool pool;
    for (const Group& g : m.groups()) {
        pool.p.push_back(rational_to_double(g.prob));
        pool.mult.push_back(static_cast<double>(g.count));
    }
    return pool;
}

void check_query(const RisingMomentQuery& query) {
    if (query.q.empty()) throw ConfigError("coupon probability vector is empty");
    if (!(query.r > 0)) throw ConfigError("moment order r must be positive");
    double total = 0.0;
    for (double qj : query.q) {
        if (!(qj > 0)) throw ConfigError("coupon probabilities must be positive");
        total += qj;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ConfigError("coupon probabilities sum to " + std::to_string(total) +
                          ", expected 1");
}

constexpr std::uint64_t kSubsetChunk = 1 << 16;

double inv_pow(double base, double r) {
    if (r == 1.0) return 1.0 / base;
    if (r == 2.0) return 1.0 / (base * base);
    return std::pow(base, -r);
}

// Signed subset contributions for Gray-code indices [lo, hi); each step
// toggles one element, so the running subset total is O(1) per term.
double subset_block(const std::vector<double>& q, double r, std::uint64_t lo,
                    std::uint64_t hi) {
    std::uint64_t mask = lo ^ (lo >> 1);
    double s = 0.0;
    for (int j = 0; j < static_cast<int>(q.size()); ++j)
        if (mask >> j & 1) s += q[j];
    int count = std::popcount(mask);

    Neumaier acc;
    for (std::uint64_t i = lo; i < hi; ++i) {
        if (mask != 0) {
            double term = inv_pow(s, r);
            acc.add((count & 1) ? term : -term);
        }
        int bit = std::countr_zero(i + 1);
        std::uint64_t flip = std::uint64_t{1} << bit;
        if (mask & flip) {
            s -= q[bit];
            --count;
        } else {
            s += q[bit];
            ++count;
        }
        mask ^= flip;
    }
    return acc.value();
}

double subset_sum_impl(const RisingMomentQuery& query, bool parallel) {
    check_query(query);
    const int n = static_cast<int>(query.q.size());
    if (n > 25) throw BudgetError("subset sum over 2^" + std::to_string(n) + " terms refused");
    const std::uint64_t total = std::uint64_t{1} << n;
    const std::uint64_t n_chunks = (total + kSubsetChunk - 1) / kSubsetChunk;

    std::vector<double> chunk(n_chunks);
    if (parallel && n_chunks > 1) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c)
            chunk[c] = subset_block(query.q, query.r, c * kSubsetChunk,
                                    std::min(total, (c + 1) * kSubsetChunk));
    } else {
        for (std::uint64_t c = 0; c < n_chunks; ++c)
            chunk[c] = subset_block(query.q, query.r, c * kSubsetChunk,
                                    std::min(total, (c + 1) * kSubsetChunk));
    }
    Neumaier acc;
    for (std::uint64_t c = 0; c < n_chunks; ++c) acc.add(chunk[c]);
    return lanczos_gamma(query.r + 1.0) * acc.value();
}

}  // namespace

double rising_moment(const RisingMomentQuery& query, const QuadratureSettings& s) {
    check_query(query);
    GroupedPool pool;
    pool.p = query.q;
    pool.mult.assign(query.q.size(), 1.0);
    return pool_rising_moment(pool, query.r, s);
}

double rising_moment_subset_sum(const RisingMomentQuery& query) {
    return subset_sum_impl(query, true);
}

double rising_moment_subset_sum_serial(const RisingMomentQuery& query) {
    return subset_sum_impl(query, false);
}

Rational rising_moment_subset_sum_exact(const std::vector<Rational>& q, int r) {
    const int n = static_cast<int>(q.size());
    if (n < 1 || n > 25) throw BudgetError("subset sum needs 1 <= N <= 25");
    if (r < 1) throw ConfigError("exact subset sum needs integer r >= 1");

    Rational acc(0);
    Rational s(0);
    std::uint64_t mask = 0;
    int count = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 0; i < total; ++i) {
        if (mask != 0) {
            // 1 / s^r, built directly; num and den stay coprime under powers
            Rational term;
            mpz_pow_ui(term.get_num_mpz_t(), s.get_den_mpz_t(), r);
            mpz_pow_ui(term.get_den_mpz_t(), s.get_num_mpz_t(), r);
            if (count & 1)
                acc += term;
            else
                acc -= term;
        }
        if (i + 1 == total) break;
        int bit = std::countr_zero(i + 1);
        if (mask >> bit & 1) {
            s -= q[bit];
            --count;
        } else {
            s += q[bit];
            ++count;
        }
        mask ^= std::uint64_t{1} << bit;
    }
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), r);
    return Rational(fact) * acc;
}

double harmonic(std::int64_t N) {
    if (N < 1) throw ConfigError("harmonic needs N >= 1");
    if (N <= 2'000'000) {
        Neumaier acc;
        for (std::int64_t j = N; j >= 1; --j) acc.add(1.0 / static_cast<double>(j));
        return acc.value();
    }
    const double n = static_cast<double>(N);
    return std::log(n) + kEulerGamma + 1.0 / (2.0 * n) - 1.0 / (12.0 * n * n) +
           1.0 / (120.0 * n * n * n * n);
}

Rational harmonic_exact(std::int64_t N) {
    if (N < 1 || N > 10'000) throw BudgetError("exact harmonic limited to 1 <= N <= 10^4");
    Rational acc(0);
    for (std::int64_t j = 1; j <= N; ++j) acc += Rational(1, static_cast<unsigned long>(j));
    return acc;
}

double inverse_square_sum(std::int64_t N) {
    if (N < 1) throw ConfigError("inverse_square_sum needs N >= 1");
    if (N <= 2'000'000) {
        Neumaier acc;
        for (std::int64_t j = N; j >= 1; --j) {
            double d = static_cast<double>(j);
            acc.add(1.0 / (d * d));
        }
        return acc.value();
    }
    const double n = static_cast<double>(N);
    return kPiSqOver6 - 1.0 / n + 1.0 / (2.0 * n * n) - 1.0 / (6.0 * n * n * n) +
           1.0 / (30.0 * n * n * n * n * n);
}

double uniform_mean(std::int64_t N) { return static_cast<double>(N) * harmonic(N); }

double uniform_second_rising(std::int64_t N) {
    const double h = harmonic(N);
    return static_cast<double>(N) * static_cast<double>(N) * (h * h + inverse_square_sum(N));
}

double theta_mean_exact(const ThetaExample& x, const QuadratureSettings& s) {
    if (x.N < 1) throw ConfigError("theta example needs N >= 1");
    const double theta = rational_to_double(x.theta);
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
    const double n = static_cast<double>(x.N);

    const double j1 = n * harmonic(x.N) / (1.0 - theta);

    const double rate = (1.0 - theta) / n;
    auto f = [&](double t) {
        return std::exp(-theta * t + n * std::log1p(-std::exp(-rate * t)));
    };
    const double t_hi = std::log(2.0 / (theta * std::max(s.abs_tol, 1e-300))) / theta;
    std::vector<double> breaks;
    for (int k = 12; k >= 1; --k) breaks.push_back(t_hi * std::ldexp(1.0, -k));
    QuadratureSettings local = s;
    local.abs_tol = 0.5 * s.abs_tol;
    const double j2 = integrate_adaptive(f, 0.0, t_hi, local, breaks).value;
    return j1 + j2;
}

double mixture_moment(const GroupMixture& m, double r, const QuadratureSettings& s) {
    return pool_rising_moment(pool_from_mixture(m), r, s);
}

double group_detection_moment(const GroupMixture& m, int group, double r,
                              const QuadratureSettings& s) {
    if (group < 1 || group > m.group_count()) throw ConfigError("group index out of range");
    GroupedPool pool;
    pool.p.push_back(m.prob_d(group - 1));
    pool.mult.push_back(static_cast<double>(m.count(group - 1)));
    return pool_rising_moment(pool, r, s);
}

double group_detection_moment_subset(const GroupMixture& m, int group, double r) {
    if (group < 1 || group > m.group_count()) throw ConfigError("group index out of range");
    if (!(r > 0)) throw ConfigError("moment order r must be positive");
    const std::int64_t M = m.count(group - 1);
    if (M > 60) throw BudgetError("binomial route refused for group count > 60");
    const double p = m.prob_d(group - 1);

    // Gamma(r+1) sum_k C(M,k) (-1)^(k-1) / (k p)^r over the group's coupons.
    Neumaier acc;
    for (std::int64_t k = 1; k <= M; ++k) {
        double term = std::exp(log_binomial(M, k) - r * std::log(static_cast<double>(k) * p));
        acc.add((k & 1) ? term : -term);
    }
    return lanczos_gamma(r + 1.0) * acc.value();
}

}  // namespace couponmix::exact
