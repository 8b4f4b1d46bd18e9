#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "couponmix/errors.hpp"
#include "couponmix/rational.hpp"

namespace couponmix {

// One uniform group: `count` coupons, each occurring with probability `prob`
// per draw.
struct Group {
    std::int64_t count = 0;
    Rational prob;
};

struct MixtureValidation {
    bool ok = false;
    std::string message;   // which invariant failed
    Rational residual;     // sum(M_j p_j) - 1
};

// Checks group counts/probabilities and the unit-mass constraint. Mixtures
// built from exact rational inputs must satisfy sum(M_j p_j) = 1 exactly;
// mixtures whose probabilities arrived through doubles are accepted when the
// residual is within 1e-12.
MixtureValidation validate_groups(const std::vector<Group>& groups);

// A pool made of g uniform coupon groups. Immutable after construction; the
// constructor enforces the invariants above and throws ConfigError otherwise.
class GroupMixture {
  public:
    explicit GroupMixture(std::vector<Group> groups);

    const std::vector<Group>& groups() const { return groups_; }
    int group_count() const { return static_cast<int>(groups_.size()); }
    std::int64_t count(int j) const { return groups_[j].count; }
    const Rational& prob(int j) const { return groups_[j].prob; }
    double prob_d(int j) const { return rational_to_double(groups_[j].prob); }
    Rational mass(int j) const;  // M_j p_j
    std::int64_t total_coupons() const;

    // Unit mass holds exactly (not merely within the float tolerance).
    bool exact_unit_mass() const { return exact_unit_mass_; }
    // All probability denominators small enough for cheap exact arithmetic.
    bool cheap_rational() const { return cheap_rational_; }

  private:
    std::vector<Group> groups_;
    bool exact_unit_mass_ = false;
    bool cheap_rational_ = false;
};

// Two-group family M1 = nu1*M, M2 = nu2*M with a fixed probability ratio
// lambda = p2/p1. lambda is carried as an exact rational so the derived
// mixture satisfies the unit-mass constraint exactly.
struct ScalingFamily {
    int nu1 = 1;
    int nu2 = 1;
    Rational lambda;
    std::int64_t M = 1;

    Rational alpha1() const;  // nu1 / (nu1 + lambda*nu2)
    Rational alpha2() const;  // lambda*nu2 / (nu1 + lambda*nu2)
    double lambda_d() const { return rational_to_double(lambda); }
    double rate() const;  // nu1 + lambda*nu2, the M ln M coefficient for T1 and T

    // Relabels the groups (swaps nu1/nu2 and inverts lambda).
    ScalingFamily swapped() const;
};

void validate_scaling(const ScalingFamily& f);

// Expands the family at its current M: group 1 holds nu1*M coupons at
// alpha1/(nu1*M) each, group 2 holds nu2*M coupons at alpha2/(nu2*M) each.
GroupMixture mixture_from_scaling(const ScalingFamily& f);

// The one-rare-coupon pool: coupon 0 has probability theta, the other N
// coupons share (1-theta) uniformly.
struct ThetaExample {
    std::int64_t N = 1;
    Rational theta;

    GroupMixture to_mixture() const;
};

// Pools groups 2..g of the ascending-probability ordering into a single
// uniform group, once at the second-smallest probability level and once at
// the largest, then rescales both probabilities of each output by a common
// factor so the unit-mass constraint holds again. The common rescale keeps
// the probability ratio of the two output groups, which is the quantity the
// two-group formulas depend on. These are bounding heuristics, not tested
// order relations.
std::pair<GroupMixture, GroupMixture> bounding_two_group_mixtures(const GroupMixture& m);

}  // namespace couponmix
