#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

#include "couponmix/exact.hpp"
#include "couponmix/special.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace couponmix::exact {

namespace {

constexpr std::int64_t kFloatChunk = 32768;

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

double term_count(const GroupMixture& m) {
    double p = 1.0;
    for (const Group& g : m.groups()) p *= static_cast<double>(g.count);
    return p;
}

// --- exact alternating sum ------------------------------------------------

Rational alternating_sum_rational(const GroupMixture& m, int l) {
    const int g = m.group_count();
    std::vector<std::int64_t> M(g);
    std::vector<Rational> p(g);
    for (int j = 0; j < g; ++j) {
        M[j] = m.count(j);
        p[j] = m.prob(j);
    }

    std::vector<std::vector<mpz_class>> binom(g);
    for (int j = 0; j < g; ++j) {
        binom[j].resize(M[j] + 1);
        for (std::int64_t k = 1; k <= M[j]; ++k)
            mpz_bin_uiui(binom[j][k].get_mpz_t(), M[j], k);
    }

    std::vector<std::int64_t> k(g, 1);
    Rational denom(0);
    std::int64_t ksum = 0;
    for (int j = 0; j < g; ++j) {
        denom += rational_from_int(k[j]) * p[j];
        ksum += k[j];
    }

    Rational total(0);
    mpz_class binprod;
    while (true) {
        binprod = 1;
        for (int j = 0; j < g; ++j) binprod *= binom[j][k[j]];
        Rational term = Rational(binprod) * rational_from_int(k[l]) * p[l] / denom;
        if ((g + ksum) % 2 == 0)
            total += term;
        else
            total -= term;

        int j = 0;
        while (j < g) {
            if (k[j] < M[j]) {
                ++k[j];
                denom += p[j];
                ++ksum;
                break;
            }
            denom -= rational_from_int(M[j] - 1) * p[j];
            ksum -= M[j] - 1;
            k[j] = 1;
            ++j;
        }
        if (j == g) break;
    }
    return total;
}

// --- compensated float sum --------------------------------------------------

struct FloatSumTables {
    int g;
    int l;
    std::vector<std::int64_t> M;
    std::vector<double> p;
    std::vector<std::vector<double>> log_binom;  // per group, index k
    std::int64_t terms = 1;
};

constexpr std::int64_t kMaxFloatTerms = 10'000'000'000;

FloatSumTables make_tables(const GroupMixture& m, int l) {
    FloatSumTables t;
    t.g = m.group_count();
    t.l = l;
    t.M.resize(t.g);
    t.p.resize(t.g);
    t.log_binom.resize(t.g);
    for (int j = 0; j < t.g; ++j) {
        t.M[j] = m.count(j);
        t.p[j] = m.prob_d(j);
        t.log_binom[j].resize(t.M[j] + 1);
        for (std::int64_t k = 1; k <= t.M[j]; ++k)
            t.log_binom[j][k] = log_binomial(t.M[j], k);
        if (t.terms > kMaxFloatTerms / t.M[j])
            throw BudgetError("alternating sum over more than 10^10 terms refused");
        t.terms *= t.M[j];
    }
    return t;
}

// Walks the multi-index block [lo, hi) of the alternating sum, accumulating
// the signed terms and their absolute values. Index digit j runs over
// k_j - 1 in mixed radix with group 0 fastest.
void float_sum_block(const FloatSumTables& t, std::int64_t lo, std::int64_t hi,
                     Neumaier& acc, Neumaier& abs_acc, bool& overflow) {
    const int g = t.g;
    std::vector<std::int64_t> k(g);
    std::int64_t rest = lo;
    for (int j = 0; j < g; ++j) {
        k[j] = rest % t.M[j] + 1;
        rest /= t.M[j];
    }
    double log_c = 0.0, denom = 0.0;
    std::int64_t ksum = 0;
    for (int j = 0; j < g; ++j) {
        log_c += t.log_binom[j][k[j]];
        denom += static_cast<double>(k[j]) * t.p[j];
        ksum += k[j];
    }
    const double num_l = t.p[t.l];

    for (std::int64_t i = lo; i < hi; ++i) {
        double lmag = log_c + std::log(static_cast<double>(k[t.l]) * num_l) - std::log(denom);
        if (lmag > 708.0) overflow = true;
        double mag = std::exp(lmag);
        bool negative = ((g + ksum) & 1) != 0;
        acc.add(negative ? -mag : mag);
        abs_acc.add(mag);

        int j = 0;
        while (j < g) {
            if (k[j] < t.M[j]) {
                log_c += t.log_binom[j][k[j] + 1] - t.log_binom[j][k[j]];
                ++k[j];
                denom += t.p[j];
                ++ksum;
                break;
            }
            log_c += t.log_binom[j][1] - t.log_binom[j][t.M[j]];
            denom -= static_cast<double>(t.M[j] - 1) * t.p[j];
            ksum -= t.M[j] - 1;
            k[j] = 1;
            ++j;
        }
    }
}

CompensatedValue float_sum(const GroupMixture& m, int l, bool parallel) {
    FloatSumTables t = make_tables(m, l);
    const std::int64_t n_chunks = (t.terms + kFloatChunk - 1) / kFloatChunk;

    bool overflow = false;
    std::vector<double> chunk_sum(n_chunks), chunk_abs(n_chunks);
    if (parallel && n_chunks > 1) {
#pragma omp parallel for schedule(dynamic) reduction(|| : overflow)
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            Neumaier acc, abs_acc;
            float_sum_block(t, c * kFloatChunk, std::min(t.terms, (c + 1) * kFloatChunk),
                            acc, abs_acc, overflow);
            chunk_sum[c] = acc.value();
            chunk_abs[c] = abs_acc.value();
        }
    } else {
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            Neumaier acc, abs_acc;
            float_sum_block(t, c * kFloatChunk, std::min(t.terms, (c + 1) * kFloatChunk),
                            acc, abs_acc, overflow);
            chunk_sum[c] = acc.value();
            chunk_abs[c] = abs_acc.value();
        }
    }

    Neumaier total, total_abs;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        total.add(chunk_sum[c]);
        total_abs.add(chunk_abs[c]);
    }
    if (overflow)
        return {std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::infinity()};
    return {total.value(), total_abs.value()};
}

// --- lattice recursion ------------------------------------------------------

template <typename Value>
Value dp_solve(const GroupMixture& m, int l, std::size_t memory_budget) {
    const int g = m.group_count();
    std::vector<std::int64_t> dims(g);
    std::vector<std::int64_t> stride(g);
    std::int64_t cells = 1;
    for (int j = 0; j < g; ++j) {
        dims[j] = m.count(j) + 1;
        stride[j] = cells;
        if (cells > (std::numeric_limits<std::int64_t>::max() / dims[j]))
            throw BudgetError("lattice size overflows the index range");
        cells *= dims[j];
    }
    const std::size_t per_cell = std::is_same_v<Value, double> ? sizeof(double) : 96;
    if (static_cast<std::size_t>(cells) > memory_budget / per_cell)
        throw BudgetError("lattice of " + std::to_string(cells) +
                          " cells exceeds the memory budget");

    std::vector<Value> p(g);
    for (int j = 0; j < g; ++j) {
        if constexpr (std::is_same_v<Value, double>)
            p[j] = m.prob_d(j);
        else
            p[j] = m.prob(j);
    }

    std::vector<Value> grid(cells);
    std::vector<std::int64_t> n(g, 0);
    for (std::int64_t idx = 0; idx < cells; ++idx) {
        int zeros = 0, zero_at = -1;
        for (int j = 0; j < g; ++j)
            if (n[j] == 0) {
                ++zeros;
                zero_at = j;
            }
        if (zeros >= 2) {
            grid[idx] = Value(0);  // never referenced by interior cells
        } else if (zeros == 1) {
            grid[idx] = Value(zero_at == l ? 1 : 0);
        } else {
            Value num(0), den(0);
            for (int j = 0; j < g; ++j) {
                Value w = p[j] * Value(static_cast<long>(n[j]));
                num += w * grid[idx - stride[j]];
                den += w;
            }
            grid[idx] = num / den;
        }
        int j = 0;
        while (j < g && ++n[j] == dims[j]) n[j++] = 0;
    }
    return grid[cells - 1];
}

// --- integral forms -----------------------------------------------------------

struct TwoGroup {
    double p1, p2, lambda;
    std::int64_t M1, M2;
};

double integrate_exponential_form(const TwoGroup& t, const QuadratureSettings& s,
                                  double t_lo) {
    // integrand <= p2 M2 e^(-p2 t), so the tail beyond t_hi is below abs_tol/2
    const double t_hi = std::log(2.0 * static_cast<double>(t.M2) /
                                 std::max(s.abs_tol, 1e-300)) / t.p2;
    if (t_hi <= t_lo) return 0.0;
    auto f = [&](double x) {
        double e1 = std::exp(-t.p1 * x);
        double e2 = std::exp(-t.p2 * x);
        if (e1 >= 1.0 || e2 >= 1.0) return 0.0;  // x == 0
        double lg = t.M1 * std::log1p(-e1) - t.p2 * x;
        if (t.M2 > 1) lg += (t.M2 - 1) * std::log1p(-e2);
        return t.p2 * static_cast<double>(t.M2) * std::exp(lg);
    };
    std::vector<double> breaks;
    for (int k = 10; k >= 1; --k) {
        double cut = t_hi * std::ldexp(1.0, -k);
        if (cut > t_lo) breaks.push_back(cut);
    }
    return integrate_adaptive(f, t_lo, t_hi, s, breaks).value;
}

double integral_value(const TwoGroup& t, IntegralForm form, const QuadratureSettings& s) {
    const double m1 = static_cast<double>(t.M1);
    const double m2 = static_cast<double>(t.M2);
    switch (form) {
        case IntegralForm::Ratio: {
            auto f = [&](double x) {
                double xl = std::pow(x, t.lambda);
                double lg = m1 * std::log1p(-x);
                if (t.M2 > 1) lg += (m2 - 1.0) * std::log1p(-std::min(xl, 1.0));
                return t.lambda * m2 * std::pow(x, t.lambda - 1.0) * std::exp(lg);
            };
            return integrate_adaptive(f, 0.0, 1.0, s).value;
        }
        case IntegralForm::RatioRoot: {
            auto f = [&](double x) {
                double xr = std::pow(x, 1.0 / t.lambda);
                double lg = m1 * std::log1p(-std::min(xr, 1.0));
                if (t.M2 > 1) lg += (m2 - 1.0) * std::log1p(-x);
                return m2 * std::exp(lg);
            };
            return integrate_adaptive(f, 0.0, 1.0, s).value;
        }
        case IntegralForm::Exponential:
            return integrate_exponential_form(t, s, 0.0);
        case IntegralForm::Direct: {
            // The x^(p2-1) factor is close to x^(-1) for small p2, which no
            // bisection scheme can chase to x = 0. Evaluate [1/2, 1] in the
            // x domain as written and map [0, 1/2) through x = e^(-t).
            QuadratureSettings half = s;
            half.abs_tol = 0.5 * s.abs_tol;
            auto f = [&](double x) {
                double lg = (t.p2 - 1.0) * std::log(x) +
                            m1 * std::log1p(-std::pow(x, t.p1));
                if (t.M2 > 1) lg += (m2 - 1.0) * std::log1p(-std::pow(x, t.p2));
                return t.p2 * m2 * std::exp(lg);
            };
            double right = integrate_adaptive(f, 0.5, 1.0, half).value;
            double head = integrate_exponential_form(t, half, std::log(2.0));
            return right + head;
        }
    }
    throw ConfigError("unknown integral form");
}

}  // namespace

double CompensatedValue::cancellation_ratio() const {
    if (abs_sum == 0.0) return 1.0;
    if (value == 0.0 || !std::isfinite(value)) return std::numeric_limits<double>::infinity();
    return abs_sum / std::fabs(value);
}

CompensatedValue first_detection_sum_float(const GroupMixture& m, int group) {
    return float_sum(m, group - 1, true);
}

CompensatedValue first_detection_sum_float_serial(const GroupMixture& m, int group) {
    return float_sum(m, group - 1, false);
}

Rational first_detection_prob_dp(const GroupMixture& m, int group, std::size_t memory_budget) {
    if (group < 1 || group > m.group_count()) throw ConfigError("group index out of range");
    return dp_solve<Rational>(m, group - 1, memory_budget);
}

double first_detection_prob_dp_float(const GroupMixture& m, int group,
                                     std::size_t memory_budget) {
    if (group < 1 || group > m.group_count()) throw ConfigError("group index out of range");
    return dp_solve<double>(m, group - 1, memory_budget);
}

FirstDetectionResult first_detection_prob_sum(const GroupMixture& m, int group, EvalMode mode,
                                              const SumSettings& settings) {
    if (group < 1 || group > m.group_count()) throw ConfigError("group index out of range");
    const int l = group - 1;
    const double terms = term_count(m);

    auto rational_result = [&]() {
        Rational q = alternating_sum_rational(m, l);
        FirstDetectionResult r;
        r.value = rational_to_double(q);
        r.exact = std::move(q);
        r.route = "sum-rational";
        return r;
    };
    auto float_result = [&]() {
        CompensatedValue cv = first_detection_sum_float(m, group);
        FirstDetectionResult r;
        r.value = cv.value;
        r.cancellation_ratio = cv.cancellation_ratio();
        r.route = "sum-float";
        return r;
    };

    switch (mode) {
        case EvalMode::Rational:
            if (terms > static_cast<double>(settings.max_rational_terms))
                throw BudgetError("exact sum over " + std::to_string(terms) +
                                  " terms exceeds the configured limit");
            return rational_result();
        case EvalMode::CompensatedFloat:
            return float_result();
        case EvalMode::Auto:
            break;
    }

    if (m.cheap_rational() && terms <= static_cast<double>(settings.max_rational_terms))
        return rational_result();

    if (terms <= static_cast<double>(kMaxFloatTerms)) {
        FirstDetectionResult r = float_result();
        if (r.cancellation_ratio * DBL_EPSILON <= settings.cancellation_limit) return r;
    }

    // The alternating sum lost too many digits; the lattice recursion has
    // only nonnegative coefficients and cannot cancel.
    double cells = 1.0;
    for (const Group& g : m.groups()) cells *= static_cast<double>(g.count + 1);
    if (cells * sizeof(double) <= static_cast<double>(settings.dp_memory_budget)) {
        FirstDetectionResult dp;
        dp.value = first_detection_prob_dp_float(m, group, settings.dp_memory_budget);
        dp.route = "dp-float";
        return dp;
    }
    if (m.group_count() == 2) {
        FirstDetectionResult iv;
        double p_first = p_t1_before_t2_integral(m, IntegralForm::Ratio);
        iv.value = (l == 0) ? p_first : 1.0 - p_first;
        iv.route = "integral";
        return iv;
    }
    throw NumericalError(
        "alternating sum cancellation exceeds the reliability limit and no "
        "stable fallback fits this mixture");
}

IntegralForm integral_form_from_string(const std::string& name) {
    if (name == "direct") return IntegralForm::Direct;
    if (name == "ratio") return IntegralForm::Ratio;
    if (name == "ratio-root") return IntegralForm::RatioRoot;
    if (name == "exponential") return IntegralForm::Exponential;
    throw ConfigError("unknown integral form '" + name +
                      "' (expected direct|ratio|ratio-root|exponential)");
}

std::string integral_form_name(IntegralForm form) {
    switch (form) {
        case IntegralForm::Direct: return "direct";
        case IntegralForm::Ratio: return "ratio";
        case IntegralForm::RatioRoot: return "ratio-root";
        case IntegralForm::Exponential: return "exponential";
    }
    return "?";
}

double p_t1_before_t2_integral(const GroupMixture& m, IntegralForm form,
                               const QuadratureSettings& s) {
    if (m.group_count() != 2)
        throw ConfigError("integral forms are defined for two-group mixtures");
    if (m.prob(1) < m.prob(0)) {
        GroupMixture swapped({m.groups()[1], m.groups()[0]});
        return 1.0 - p_t1_before_t2_integral(swapped, form, s);
    }
    TwoGroup t;
    t.p1 = m.prob_d(0);
    t.p2 = m.prob_d(1);
    t.lambda = rational_to_double(m.prob(1) / m.prob(0));
    t.M1 = m.count(0);
    t.M2 = m.count(1);
    return integral_value(t, form, s);
}

double p_t1_before_t2_integral_raw(double p1, double p2, std::int64_t M1, std::int64_t M2,
                                   IntegralForm form, const QuadratureSettings& s) {
    if (!(p1 > 0.0) || !(p2 > 0.0)) throw ConfigError("probabilities must be positive");
    if (M1 < 1 || M2 < 1) throw ConfigError("group counts must be positive");
    if (p2 < p1) return 1.0 - p_t1_before_t2_integral_raw(p2, p1, M2, M1, form, s);
    return integral_value(TwoGroup{p1, p2, p2 / p1, M1, M2}, form, s);
}

}  // namespace couponmix::exact
