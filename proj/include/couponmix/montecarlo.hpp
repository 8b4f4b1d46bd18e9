#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "couponmix/model.hpp"

namespace couponmix::montecarlo {

// Per-trial random stream keyed by (seed, trial index): xoshiro256++ state
// derived through a splitmix finalizer, so trial assignment to workers never
// changes the draws a trial sees.
class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial);

    std::uint64_t next_u64();
    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t s_[4];
};

struct TrialOutcome {
    std::vector<std::uint64_t> t_group;  // completion draw per group
    std::uint64_t t_total = 0;           // max over groups
    int first_group = 0;                 // argmin over groups
};

// Draws coupons until every coupon has been seen; two uniforms per draw
// (group by cumulative mass, then the index inside the group).
TrialOutcome simulate_trial(const GroupMixture& m, TrialRng& rng);

// One-pass central-moment accumulator (through the 4th) with an order-fixed
// merge, so chunked parallel accumulation reproduces bitwise.
struct MomentStats {
    std::uint64_t n = 0;
    double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;

    void add(double x);
    void merge(const MomentStats& o);
    double variance() const;         // sample variance, n-1
    double stderr_mean() const;
    double stderr_variance() const;  // from the 4th central moment
};

enum class Retain { None, Total, All };

struct SimConfig {
    std::uint64_t seed = 0;
    std::uint64_t trials = 1;
    int workers = 1;
    Retain retain = Retain::None;
};

// Retained samples are capped; runs past the cap keep the first kSampleCap
// trials' values.
inline constexpr std::uint64_t kSampleCap = 1'000'000;

struct EmpiricalSummary {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    std::vector<std::uint64_t> first_count;
    std::vector<double> first_freq;
    std::vector<MomentStats> group_time;
    MomentStats total_time;
    std::vector<double> samples_total;
    std::vector<std::vector<double>> samples_group;
    std::vector<Group> mixture;  // the pool the summary came from
};

// Deterministic for fixed (seed, trials): trials are accumulated in
// fixed-size index chunks and merged in chunk order, so the byte-identical
// output also does not depend on `workers` (which only caps the thread
// count).
EmpiricalSummary estimate(const GroupMixture& m, const SimConfig& cfg);

// Plain sequential reference: one accumulator, trials in order. Kept for
// tests and benchmarks against the chunked kernel.
EmpiricalSummary estimate_serial(const GroupMixture& m, const SimConfig& cfg);

enum class Normalization {
    T1,           // (x - c M ln M) / (c M) - ln nu1,  c = nu1 + lambda nu2
    T2,           // same with c' = nu1/lambda + nu2 and ln nu2
    Total,        // T uses T1's transform
    UniformPool,  // (x - N ln N) / N for a one-group pool of N coupons
    ThetaPool     // ((1-theta) x - N ln N) / N for the one-rare-coupon pool
};

// Applies the centering/scaling matching the limit law of the chosen
// quantity. The scaling family is required for the T1/T2/Total transforms;
// the pool transforms recover N (and theta) from the summary's mixture.
std::vector<double> normalized_samples(const EmpiricalSummary& summary, Normalization which,
                                       const std::optional<ScalingFamily>& f = {});

}  // namespace couponmix::montecarlo
