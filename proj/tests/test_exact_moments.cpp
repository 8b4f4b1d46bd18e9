#include <doctest.h>

#include <cmath>
#include <random>

#include "couponmix/exact.hpp"
#include "test_util.hpp"

using namespace couponmix;
using namespace couponmix::exact;
using doctest::Approx;

TEST_CASE("rising moment of a single coupon") {
    CHECK(rising_moment({{1.0}, 1.0}) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rising moment closed-form anchors") {
    // S for two fair coupons is 1 + Geometric(1/2): E[S(S+1)] = 14
    CHECK(rising_moment({{0.5, 0.5}, 2.0}) == Approx(14.0).epsilon(1e-9));
    // inclusion-exclusion value 3 + 3/2 - 1 = 7/2
    CHECK(rising_moment({{1.0 / 3, 2.0 / 3}, 1.0}) == Approx(3.5).epsilon(1e-9));
}

TEST_CASE("subset route matches its frozen values") {
    CHECK(rising_moment_subset_sum({{1.0}, 1.0}) == Approx(1.0).epsilon(1e-12));
    CHECK(rising_moment_subset_sum({{1.0 / 3, 2.0 / 3}, 1.0}) == Approx(3.5).epsilon(1e-12));

    // frozen: E[S^(2)] = 530/9 for q = (1/4, 1/4, 1/2)
    RisingMomentQuery q{{0.25, 0.25, 0.5}, 2.0};
    CHECK(rising_moment_subset_sum(q) == Approx(530.0 / 9).epsilon(1e-12));
    CHECK(rising_moment(q) == Approx(530.0 / 9).epsilon(1e-9));

    CHECK(rising_moment_subset_sum_exact({Rational(1, 4), Rational(1, 4), Rational(1, 2)},
                                         2) == Rational(530, 9));
    CHECK(rising_moment_subset_sum_exact({Rational(1, 4), Rational(1, 4), Rational(1, 2)},
                                         1) == Rational(19, 3));
    CHECK(rising_moment_subset_sum_exact({Rational(1, 3), Rational(2, 3)}, 1) ==
          Rational(7, 2));
}

TEST_CASE("quadrature and subset routes agree for random pools") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> n_dist(2, 12);
    std::uniform_real_distribution<double> w_dist(0.1, 1.0);
    for (int i = 0; i < 6; ++i) {
        int n = n_dist(rng);
        std::vector<double> q(n);
        double total = 0.0;
        for (double& w : q) total += (w = w_dist(rng));
        for (double& w : q) w /= total;
        for (double r : {0.5, 1.0, 2.0, 3.7}) {
            double a = rising_moment({q, r});
            double b = rising_moment_subset_sum({q, r});
            CHECK(std::fabs(a - b) <= std::max(1e-9, 1e-8 * std::fabs(b)));
        }
    }
}

TEST_CASE("parallel and serial subset sums match bitwise") {
    std::vector<double> q(18);
    double total = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) total += (q[j] = 1.0 / (j + 2.0));
    for (double& w : q) w /= total;
    RisingMomentQuery query{q, 3.7};
    CHECK(rising_moment_subset_sum(query) == rising_moment_subset_sum_serial(query));
}

TEST_CASE("rising moment grows with the order") {
    std::vector<double> q{0.2, 0.3, 0.5};
    double prev = 0.0;
    for (double r : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        double v = rising_moment({q, r});
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("query validation") {
    CHECK_THROWS_AS(rising_moment({{0.5, 0.5}, 0.0}), ConfigError);
    CHECK_THROWS_AS(rising_moment({{0.5, 0.4}, 1.0}), ConfigError);
    CHECK_THROWS_AS(rising_moment({{}, 1.0}), ConfigError);
    CHECK_THROWS_AS(rising_moment_subset_sum({std::vector<double>(26, 1.0 / 26), 1.0}),
                    BudgetError);
}

TEST_CASE("harmonic numbers") {
    CHECK(harmonic(1) == Approx(1.0));
    CHECK(harmonic_exact(2) == Rational(3, 2));
    CHECK(harmonic_exact(6) == Rational(49, 20));
    CHECK(harmonic(10000) ==
          Approx(rational_to_double(harmonic_exact(10000))).epsilon(1e-13));
    CHECK_THROWS_AS(harmonic_exact(10001), BudgetError);
    CHECK_THROWS_AS(harmonic(0), ConfigError);
    // the large-N switch stays continuous
    CHECK(harmonic(2'000'001) == Approx(harmonic(2'000'000) + 1.0 / 2'000'001).epsilon(1e-12));
}

TEST_CASE("inverse square sums") {
    CHECK(inverse_square_sum(1) == Approx(1.0));
    CHECK(inverse_square_sum(10) == Approx(1.5497677311665408).epsilon(1e-14));
}

TEST_CASE("uniform closed forms") {
    CHECK(uniform_mean(1) == Approx(1.0));
    CHECK(uniform_mean(2) == Approx(3.0).epsilon(1e-14));
    CHECK(uniform_mean(3) == Approx(5.5).epsilon(1e-14));

    CHECK(uniform_second_rising(1) == Approx(2.0).epsilon(1e-14));
    CHECK(uniform_second_rising(2) == Approx(14.0).epsilon(1e-14));
    CHECK(uniform_second_rising(5) == Approx(12019.0 / 72).epsilon(1e-14));
}

TEST_CASE("uniform closed forms agree with the quadrature route") {
    for (std::int64_t n : {2, 5, 20, 60, 200}) {
        std::vector<double> q(n, 1.0 / static_cast<double>(n));
        CHECK(rising_moment({q, 1.0}) ==
              Approx(uniform_mean(n)).epsilon(1e-8));
        CHECK(rising_moment({q, 2.0}) ==
              Approx(uniform_second_rising(n)).epsilon(1e-8));
    }
}

TEST_CASE("one-rare-coupon mean, exact decomposition") {
    // theta=1/2, N=1 is the two fair coupons pool: closed-form mean 3,
    // with J1 = 2 and J2 = 1 (the tail term is not negligible at small N)
    ThetaExample half{1, Rational(1, 2)};
    CHECK(theta_mean_exact(half) == Approx(3.0).epsilon(1e-9));

    ThetaExample third{1, Rational(1, 3)};
    CHECK(theta_mean_exact(third) == Approx(3.5).epsilon(1e-9));
}

TEST_CASE("one-rare-coupon mean against the per-coupon route") {
    ThetaExample x{50, Rational(1, 2)};
    std::vector<double> q{0.5};
    for (int j = 0; j < 50; ++j) q.push_back(0.01);
    CHECK(theta_mean_exact(x) == Approx(rising_moment({q, 1.0})).epsilon(1e-6));
}

TEST_CASE("mixture moments") {
    GroupMixture uniform3({{3, Rational(1, 3)}});
    CHECK(mixture_moment(uniform3, 1.0) == Approx(5.5).epsilon(1e-9));

    GroupMixture race({{1, Rational(1, 3)}, {1, Rational(2, 3)}});
    CHECK(mixture_moment(race, 1.0) == Approx(3.5).epsilon(1e-9));

    // frozen: E[T] = 19/3 for counts (2,1) at probs (1/4, 1/2)
    GroupMixture two_one({{2, Rational(1, 4)}, {1, Rational(1, 2)}});
    CHECK(mixture_moment(two_one, 1.0) == Approx(19.0 / 3).epsilon(1e-9));
}

TEST_CASE("single-group detection moments") {
    GroupMixture two_one({{2, Rational(1, 4)}, {1, Rational(1, 2)}});
    // group 1 alone: 1/(1/4) + 1/(1/4) - 1/(1/2) = 6
    CHECK(group_detection_moment(two_one, 1, 1.0) == Approx(6.0).epsilon(1e-9));
    CHECK(group_detection_moment_subset(two_one, 1, 1.0) == Approx(6.0).epsilon(1e-12));
    // group 2 is a single coupon: E[T2] = 1/p = 2
    CHECK(group_detection_moment(two_one, 2, 1.0) == Approx(2.0).epsilon(1e-9));
    CHECK(group_detection_moment_subset(two_one, 2, 1.0) == Approx(2.0).epsilon(1e-12));

    for (double r : {0.5, 2.0}) {
        CHECK(group_detection_moment(two_one, 1, r) ==
              Approx(group_detection_moment_subset(two_one, 1, r)).epsilon(1e-8));
    }
}
