#include <doctest.h>

#include <random>

#include "couponmix/model.hpp"
#include "test_util.hpp"

using namespace couponmix;

TEST_CASE("scaling family expands to the expected two-group pools") {
    ScalingFamily f{1, 1, Rational(1), 1};
    GroupMixture m = mixture_from_scaling(f);
    CHECK(m.group_count() == 2);
    CHECK(m.count(0) == 1);
    CHECK(m.prob(0) == Rational(1, 2));
    CHECK(m.prob(1) == Rational(1, 2));

    f.lambda = Rational(2);
    m = mixture_from_scaling(f);
    CHECK(m.prob(0) == Rational(1, 3));
    CHECK(m.prob(1) == Rational(2, 3));

    f.M = 5;
    m = mixture_from_scaling(f);
    CHECK(m.count(0) == 5);
    CHECK(m.count(1) == 5);
    CHECK(m.prob(0) == Rational(1, 15));
    CHECK(m.prob(1) == Rational(2, 15));
    CHECK(m.exact_unit_mass());
}

TEST_CASE("scaling family recovers lambda exactly from the probability ratio") {
    ScalingFamily f{3, 2, Rational(7, 3), 11};
    GroupMixture m = mixture_from_scaling(f);
    CHECK(m.prob(1) / m.prob(0) == f.lambda);
    CHECK(f.alpha1() + f.alpha2() == 1);
}

TEST_CASE("scaling validation rejects bad parameters") {
    CHECK_THROWS_AS(mixture_from_scaling(ScalingFamily{1, 1, Rational(0), 1}), ConfigError);
    CHECK_THROWS_AS(mixture_from_scaling(ScalingFamily{1, 1, Rational(-2), 1}), ConfigError);
    CHECK_THROWS_AS(mixture_from_scaling(ScalingFamily{0, 1, Rational(1), 1}), ConfigError);
    CHECK_THROWS_AS(mixture_from_scaling(ScalingFamily{1, 1, Rational(1), 0}), ConfigError);
}

TEST_CASE("mixture validation") {
    CHECK(validate_groups({{2, Rational(1, 4)}, {1, Rational(1, 2)}}).ok);

    MixtureValidation bad = validate_groups({{1, Rational(1, 2)}, {1, Rational(1, 3)}});
    CHECK_FALSE(bad.ok);
    CHECK(bad.residual == Rational(-1, 6));

    CHECK(validate_groups({{1, Rational(1)}}).ok);  // g = 1 degenerate
    CHECK_FALSE(validate_groups({}).ok);
    CHECK_FALSE(validate_groups({{0, Rational(1)}}).ok);
    CHECK_FALSE(validate_groups({{1, Rational(0)}, {1, Rational(1)}}).ok);

    CHECK_THROWS_AS(GroupMixture({{1, Rational(1, 2)}, {1, Rational(1, 3)}}), ConfigError);
}

TEST_CASE("float-built mixtures pass within tolerance but are flagged inexact") {
    // dyadic doubles that close the identity exactly
    GroupMixture m({{1, rational_from_double(0.25)}, {1, rational_from_double(0.75)}});
    CHECK(m.exact_unit_mass());
    // 3 * double(1/3) misses 1 by an ulp-scale residual: accepted, flagged
    GroupMixture n({{3, rational_from_double(1.0 / 3)}});
    CHECK_FALSE(n.exact_unit_mass());
}

TEST_CASE("theta example expands to a valid pool") {
    ThetaExample x{4, Rational(1, 3)};
    GroupMixture m = x.to_mixture();
    CHECK(m.group_count() == 2);
    CHECK(m.count(0) == 1);
    CHECK(m.prob(0) == Rational(1, 3));
    CHECK(m.count(1) == 4);
    CHECK(m.prob(1) == Rational(1, 6));
    CHECK(m.exact_unit_mass());

    CHECK_THROWS_AS((ThetaExample{3, Rational(1)}.to_mixture()), ConfigError);
    CHECK_THROWS_AS((ThetaExample{3, Rational(0)}.to_mixture()), ConfigError);
}

TEST_CASE("bounding construction: two-group input is returned unchanged") {
    GroupMixture m({{2, Rational(1, 4)}, {1, Rational(1, 2)}});
    auto [lo, hi] = bounding_two_group_mixtures(m);
    for (const GroupMixture* b : {&lo, &hi}) {
        CHECK(b->group_count() == 2);
        CHECK(b->count(0) == 2);
        CHECK(b->prob(0) == Rational(1, 4));
        CHECK(b->count(1) == 1);
        CHECK(b->prob(1) == Rational(1, 2));
    }
}

TEST_CASE("bounding construction pools the faster groups and rescales") {
    GroupMixture m({{1, Rational(1, 6)}, {1, Rational(1, 3)}, {1, Rational(1, 2)}});
    auto [lo, hi] = bounding_two_group_mixtures(m);

    CHECK(lo.count(0) == 1);
    CHECK(lo.count(1) == 2);
    CHECK(lo.prob(0) == Rational(1, 5));
    CHECK(lo.prob(1) == Rational(2, 5));
    // probability ratio of the pooled pair is preserved by the rescale
    CHECK(lo.prob(1) / lo.prob(0) == Rational(2));

    CHECK(hi.count(1) == 2);
    CHECK(hi.prob(0) == Rational(1, 7));
    CHECK(hi.prob(1) == Rational(3, 7));
    CHECK(hi.prob(1) / hi.prob(0) == Rational(3));

    CHECK_THROWS_AS(bounding_two_group_mixtures(GroupMixture({{1, Rational(1)}})),
                    ConfigError);
}

TEST_CASE("bounding outputs always validate") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 30; ++i) {
        GroupMixture m = testutil::random_rational_mixture(rng, 4, 5, 2);
        auto [lo, hi] = bounding_two_group_mixtures(m);
        CHECK(lo.group_count() == 2);
        CHECK(hi.group_count() == 2);
        CHECK(lo.exact_unit_mass());
        CHECK(hi.exact_unit_mass());
        CHECK(lo.total_coupons() == m.total_coupons());
    }
}

TEST_CASE("random rational mixtures satisfy the mass identity exactly") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        GroupMixture m = testutil::random_rational_mixture(rng, 3, 6);
        CHECK(m.exact_unit_mass());
        CHECK(m.cheap_rational());
    }
}

TEST_CASE("every scaling family expands to an exactly valid pool") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> nu(1, 5);
    std::uniform_int_distribution<int> digit(1, 9);
    std::uniform_int_distribution<std::int64_t> m_dist(1, 300);
    for (int i = 0; i < 40; ++i) {
        ScalingFamily f{nu(rng), nu(rng), Rational(digit(rng), digit(rng)), m_dist(rng)};
        f.lambda.canonicalize();
        GroupMixture m = mixture_from_scaling(f);
        CHECK(m.exact_unit_mass());
        CHECK(m.prob(1) / m.prob(0) == f.lambda);
        CHECK(m.count(0) == f.nu1 * f.M);
    }
}
