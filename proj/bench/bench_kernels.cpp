// Serial-vs-parallel comparison of the three chunked kernels: the Monte
// Carlo estimator, the inclusion-exclusion subset sum, and the compensated
// alternating sum.

#include <benchmark/benchmark.h>

#include <vector>

#include "couponmix/exact.hpp"
#include "couponmix/model.hpp"
#include "couponmix/montecarlo.hpp"

using namespace couponmix;

namespace {

GroupMixture bench_mixture() { return mixture_from_scaling({1, 1, Rational(2), 20}); }

exact::RisingMomentQuery bench_query(int n) {
    std::vector<double> q(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += (q[j] = 1.0 / (j + 2.0));
    for (double& w : q) w /= total;
    return {q, 2.0};
}

GroupMixture altsum_mixture() {
    // double-precision probabilities keep the exact path out of the way
    double p1 = 1.0 / 1200.0, p2 = 2.0 / 1200.0;
    return GroupMixture({Group{400, rational_from_double(p1)},
                         Group{400, rational_from_double(p2)}});
}

void BM_EstimateSerial(benchmark::State& state) {
    GroupMixture m = bench_mixture();
    montecarlo::SimConfig cfg{42, 20000, 1, montecarlo::Retain::None};
    for (auto _ : state) {
        auto s = montecarlo::estimate_serial(m, cfg);
        benchmark::DoNotOptimize(s.total_time.mean);
    }
}

void BM_EstimateParallel(benchmark::State& state) {
    GroupMixture m = bench_mixture();
    montecarlo::SimConfig cfg{42, 20000, static_cast<int>(state.range(0)),
                              montecarlo::Retain::None};
    for (auto _ : state) {
        auto s = montecarlo::estimate(m, cfg);
        benchmark::DoNotOptimize(s.total_time.mean);
    }
}

void BM_SubsetSumSerial(benchmark::State& state) {
    auto q = bench_query(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(exact::rising_moment_subset_sum_serial(q));
}

void BM_SubsetSumParallel(benchmark::State& state) {
    auto q = bench_query(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(exact::rising_moment_subset_sum(q));
}

void BM_AltSumSerial(benchmark::State& state) {
    GroupMixture m = altsum_mixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(exact::first_detection_sum_float_serial(m, 1).value);
}

void BM_AltSumParallel(benchmark::State& state) {
    GroupMixture m = altsum_mixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(exact::first_detection_sum_float(m, 1).value);
}

}  // namespace

BENCHMARK(BM_EstimateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetSumSerial)->Arg(20)->Arg(22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetSumParallel)->Arg(20)->Arg(22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AltSumSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AltSumParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
