#include "couponmix/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace couponmix {

MixtureValidation validate_groups(const std::vector<Group>& groups) {
    MixtureValidation v;
    if (groups.empty()) {
        v.message = "mixture needs at least one group";
        return v;
    }
    Rational mass(0);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        if (groups[j].count < 1) {
            v.message = "group " + std::to_string(j + 1) + " has count < 1";
            return v;
        }
        if (groups[j].prob <= 0) {
            v.message = "group " + std::to_string(j + 1) + " has prob <= 0";
            return v;
        }
        mass += rational_from_int(groups[j].count) * groups[j].prob;
    }
    v.residual = mass - 1;
    if (v.residual != 0 && std::abs(rational_to_double(v.residual)) > 1e-12) {
        v.message = "total mass differs from 1 by " + rational_to_string(v.residual);
        return v;
    }
    v.ok = true;
    return v;
}

GroupMixture::GroupMixture(std::vector<Group> groups) : groups_(std::move(groups)) {
    MixtureValidation v = validate_groups(groups_);
    if (!v.ok) throw ConfigError("invalid mixture: " + v.message);
    exact_unit_mass_ = (v.residual == 0);
    cheap_rational_ = std::all_of(groups_.begin(), groups_.end(), [](const Group& g) {
        return has_small_denominator(g.prob);
    });
}

Rational GroupMixture::mass(int j) const {
    return rational_from_int(groups_[j].count) * groups_[j].prob;
}

std::int64_t GroupMixture::total_coupons() const {
    return std::accumulate(groups_.begin(), groups_.end(), std::int64_t{0},
                           [](std::int64_t acc, const Group& g) { return acc + g.count; });
}

Rational ScalingFamily::alpha1() const {
    Rational denom = rational_from_int(nu1) + lambda * rational_from_int(nu2);
    return rational_from_int(nu1) / denom;
}

Rational ScalingFamily::alpha2() const {
    Rational denom = rational_from_int(nu1) + lambda * rational_from_int(nu2);
    return lambda * rational_from_int(nu2) / denom;
}

double ScalingFamily::rate() const { return nu1 + lambda_d() * nu2; }

ScalingFamily ScalingFamily::swapped() const {
    ScalingFamily g;
    g.nu1 = nu2;
    g.nu2 = nu1;
    g.lambda = Rational(1) / lambda;
    g.M = M;
    return g;
}

void validate_scaling(const ScalingFamily& f) {
    if (f.nu1 < 1 || f.nu2 < 1) throw ConfigError("nu1 and nu2 must be positive integers");
    if (f.lambda <= 0) throw ConfigError("lambda must be positive");
    if (f.M < 1) throw ConfigError("M must be a positive integer");
}

GroupMixture mixture_from_scaling(const ScalingFamily& f) {
    validate_scaling(f);
    std::int64_t m1 = f.nu1 * f.M;
    std::int64_t m2 = f.nu2 * f.M;
    Rational p1 = f.alpha1() / rational_from_int(m1);
    Rational p2 = f.alpha2() / rational_from_int(m2);
    return GroupMixture({Group{m1, p1}, Group{m2, p2}});
}

GroupMixture ThetaExample::to_mixture() const {
    if (N < 1) throw ConfigError("theta example needs N >= 1");
    if (theta <= 0 || theta >= 1) throw ConfigError("theta must lie in (0,1)");
    Rational rest = (Rational(1) - theta) / rational_from_int(N);
    return GroupMixture({Group{1, theta}, Group{N, rest}});
}

std::pair<GroupMixture, GroupMixture> bounding_two_group_mixtures(const GroupMixture& m) {
    if (m.group_count() < 2) throw ConfigError("bounding construction needs g >= 2");

    std::vector<Group> sorted = m.groups();
    std::sort(sorted.begin(), sorted.end(),
              [](const Group& a, const Group& b) { return a.prob < b.prob; });

    std::int64_t pooled_count = 0;
    for (std::size_t j = 1; j < sorted.size(); ++j) pooled_count += sorted[j].count;

    auto build = [&](const Rational& pooled_prob) {
        Rational mass = rational_from_int(sorted[0].count) * sorted[0].prob +
                        rational_from_int(pooled_count) * pooled_prob;
        Rational scale = Rational(1) / mass;
        return GroupMixture({Group{sorted[0].count, sorted[0].prob * scale},
                             Group{pooled_count, pooled_prob * scale}});
    };

    return {build(sorted[1].prob), build(sorted.back().prob)};
}

}  // namespace couponmix
