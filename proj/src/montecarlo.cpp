#include "couponmix/montecarlo.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "couponmix/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace couponmix::montecarlo {

namespace {

constexpr std::uint64_t kChunk = 4096;
constexpr std::uint64_t kMaxDrawsPerTrial = 1'000'000'000;

std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Reusable per-thread scratch for the trial loop.
struct TrialScratch {
    std::vector<double> cum_mass;       // cumulative group masses
    std::vector<double> group_size;     // M_j as double
    std::vector<std::int64_t> remaining;
    std::vector<std::uint64_t> seen;    // bitset over all coupons
    std::vector<std::uint64_t> base;    // first coupon index per group
    std::vector<std::uint64_t> t_group;

    explicit TrialScratch(const GroupMixture& m) {
        const int g = m.group_count();
        double acc = 0.0;
        std::uint64_t first = 0;
        for (int j = 0; j < g; ++j) {
            acc += rational_to_double(m.mass(j));
            cum_mass.push_back(acc);
            group_size.push_back(static_cast<double>(m.count(j)));
            base.push_back(first);
            first += static_cast<std::uint64_t>(m.count(j));
        }
        cum_mass.back() = 1.0;  // guard against rounding in the last slot
        remaining.resize(g);
        t_group.resize(g);
        seen.resize((first + 63) / 64);
    }
};

void run_trial(const GroupMixture& m, TrialRng& rng, TrialScratch& s) {
    const int g = m.group_count();
    std::fill(s.seen.begin(), s.seen.end(), 0);
    for (int j = 0; j < g; ++j) s.remaining[j] = m.count(j);

    int groups_left = g;
    std::uint64_t draw = 0;
    while (groups_left > 0) {
        if (++draw > kMaxDrawsPerTrial)
            throw NumericalError("trial exceeded the per-trial draw guard");
        const double u = rng.next_unit();
        int j = 0;
        while (u >= s.cum_mass[j]) ++j;
        const double v = rng.next_unit();
        auto index = static_cast<std::uint64_t>(v * s.group_size[j]);
        if (index >= static_cast<std::uint64_t>(m.count(j))) index = m.count(j) - 1;
        const std::uint64_t coupon = s.base[j] + index;
        std::uint64_t& word = s.seen[coupon >> 6];
        const std::uint64_t bit = std::uint64_t{1} << (coupon & 63);
        if (!(word & bit)) {
            word |= bit;
            if (--s.remaining[j] == 0) {
                s.t_group[j] = draw;
                --groups_left;
            }
        }
    }
#ifndef NDEBUG
    // each draw completes at most one group, so ties cannot occur
    for (std::size_t a = 0; a < s.t_group.size(); ++a)
        for (std::size_t b = a + 1; b < s.t_group.size(); ++b)
            assert(s.t_group[a] != s.t_group[b]);
#endif
}

struct ChunkAccum {
    std::vector<std::uint64_t> first_count;
    std::vector<MomentStats> group_time;
    MomentStats total_time;

    explicit ChunkAccum(int g) : first_count(g, 0), group_time(g) {}

    void take(const TrialScratch& s) {
        const int g = static_cast<int>(s.t_group.size());
        int first = 0;
        std::uint64_t total = 0;
        for (int j = 0; j < g; ++j) {
            if (s.t_group[j] < s.t_group[first]) first = j;
            total = std::max(total, s.t_group[j]);
            group_time[j].add(static_cast<double>(s.t_group[j]));
        }
        ++first_count[first];
        total_time.add(static_cast<double>(total));
    }
};

EmpiricalSummary estimate_impl(const GroupMixture& m, const SimConfig& cfg, bool chunked) {
    if (cfg.trials < 1) throw ConfigError("need trials >= 1");
    if (cfg.workers < 1) throw ConfigError("need workers >= 1");
    const int g = m.group_count();

    EmpiricalSummary out;
    out.trials = cfg.trials;
    out.seed = cfg.seed;
    out.workers = cfg.workers;
    out.mixture = m.groups();
    out.first_count.assign(g, 0);
    out.group_time.assign(g, {});

    const std::uint64_t retained =
        (cfg.retain == Retain::None) ? 0 : std::min(cfg.trials, kSampleCap);
    if (cfg.retain != Retain::None) out.samples_total.resize(retained);
    if (cfg.retain == Retain::All)
        out.samples_group.assign(g, std::vector<double>(retained));

    auto record_samples = [&](const TrialScratch& s, std::uint64_t trial,
                              std::uint64_t total) {
        if (trial >= retained || cfg.retain == Retain::None) return;
        out.samples_total[trial] = static_cast<double>(total);
        if (cfg.retain == Retain::All)
            for (int j = 0; j < g; ++j)
                out.samples_group[j][trial] = static_cast<double>(s.t_group[j]);
    };

    if (!chunked) {
        TrialScratch scratch(m);
        ChunkAccum acc(g);
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            TrialRng rng(cfg.seed, t);
            run_trial(m, rng, scratch);
            acc.take(scratch);
            record_samples(scratch, t,
                           *std::max_element(scratch.t_group.begin(), scratch.t_group.end()));
        }
        out.first_count = acc.first_count;
        out.group_time = acc.group_time;
        out.total_time = acc.total_time;
    } else {
        const std::uint64_t n_chunks = (cfg.trials + kChunk - 1) / kChunk;
        std::vector<ChunkAccum> acc(n_chunks, ChunkAccum(g));
#ifdef _OPENMP
        const int threads = static_cast<int>(
            std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.workers), n_chunks));
#pragma omp parallel num_threads(threads)
        {
            TrialScratch scratch(m);
#pragma omp for schedule(dynamic)
            for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
                const std::uint64_t lo = c * kChunk;
                const std::uint64_t hi = std::min(cfg.trials, lo + kChunk);
                for (std::uint64_t t = lo; t < hi; ++t) {
                    TrialRng rng(cfg.seed, t);
                    run_trial(m, rng, scratch);
                    acc[c].take(scratch);
                    record_samples(scratch, t,
                                   *std::max_element(scratch.t_group.begin(),
                                                     scratch.t_group.end()));
                }
            }
        }
#else
        TrialScratch scratch(m);
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            const std::uint64_t lo = c * kChunk;
            const std::uint64_t hi = std::min(cfg.trials, lo + kChunk);
            for (std::uint64_t t = lo; t < hi; ++t) {
                TrialRng rng(cfg.seed, t);
                run_trial(m, rng, scratch);
                acc[c].take(scratch);
                record_samples(scratch, t,
                               *std::max_element(scratch.t_group.begin(),
                                                 scratch.t_group.end()));
            }
        }
#endif
        // fold in chunk order: the merge tree is fixed by (trials, kChunk)
        for (const ChunkAccum& a : acc) {
            for (int j = 0; j < g; ++j) {
                out.first_count[j] += a.first_count[j];
                out.group_time[j].merge(a.group_time[j]);
            }
            out.total_time.merge(a.total_time);
        }
    }

    out.first_freq.resize(g);
    for (int j = 0; j < g; ++j)
        out.first_freq[j] =
            static_cast<double>(out.first_count[j]) / static_cast<double>(cfg.trials);
    return out;
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t x = seed + (trial + 1) * 0x9e3779b97f4a7c15ULL;
    for (auto& w : s_) w = splitmix(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t TrialRng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

TrialOutcome simulate_trial(const GroupMixture& m, TrialRng& rng) {
    TrialScratch scratch(m);
    run_trial(m, rng, scratch);
    TrialOutcome out;
    out.t_group = scratch.t_group;
    out.t_total = *std::max_element(out.t_group.begin(), out.t_group.end());
    out.first_group = static_cast<int>(
        std::min_element(out.t_group.begin(), out.t_group.end()) - out.t_group.begin());
    return out;
}

void MomentStats::add(double x) {
    const double n1 = static_cast<double>(n);
    ++n;
    const double nn = static_cast<double>(n);
    const double delta = x - mean;
    const double delta_n = delta / nn;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean += delta_n;
    m4 += term1 * delta_n2 * (nn * nn - 3.0 * nn + 3.0) + 6.0 * delta_n2 * m2 -
          4.0 * delta_n * m3;
    m3 += term1 * delta_n * (nn - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
}

void MomentStats::merge(const MomentStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double nt = na + nb;
    const double delta = o.mean - mean;
    const double d2 = delta * delta;

    const double m4_new = m4 + o.m4 + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) /
                          (nt * nt * nt) +
                          6.0 * d2 * (na * na * o.m2 + nb * nb * m2) / (nt * nt) +
                          4.0 * delta * (na * o.m3 - nb * m3) / nt;
    const double m3_new = m3 + o.m3 + delta * d2 * na * nb * (na - nb) / (nt * nt) +
                          3.0 * delta * (na * o.m2 - nb * m2) / nt;
    const double m2_new = m2 + o.m2 + d2 * na * nb / nt;

    mean += delta * nb / nt;
    m2 = m2_new;
    m3 = m3_new;
    m4 = m4_new;
    n += o.n;
}

double MomentStats::variance() const {
    return (n > 1) ? m2 / static_cast<double>(n - 1) : 0.0;
}

double MomentStats::stderr_mean() const {
    return (n > 1) ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

double MomentStats::stderr_variance() const {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double s2 = variance();
    const double cm4 = m4 / nn;
    const double v = (cm4 - s2 * s2 * (nn - 3.0) / (nn - 1.0)) / nn;
    return std::sqrt(std::max(v, 0.0));
}

EmpiricalSummary estimate(const GroupMixture& m, const SimConfig& cfg) {
    return estimate_impl(m, cfg, true);
}

EmpiricalSummary estimate_serial(const GroupMixture& m, const SimConfig& cfg) {
    return estimate_impl(m, cfg, false);
}

std::vector<double> normalized_samples(const EmpiricalSummary& summary, Normalization which,
                                       const std::optional<ScalingFamily>& f) {
    const int g = static_cast<int>(summary.mixture.size());

    auto need_family = [&]() -> const ScalingFamily& {
        if (!f) throw ConfigError("this normalization needs a scaling family");
        if (g != 2) throw ConfigError("this normalization needs a two-group pool");
        return *f;
    };
    auto transform = [](const std::vector<double>& xs, double center, double scale,
                        double shift) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs) out.push_back((x - center) / scale - shift);
        return out;
    };

    switch (which) {
        case Normalization::T1: {
            const ScalingFamily& fam = need_family();
            if (summary.samples_group.empty())
                throw ConfigError("group samples were not retained");
            const double c = fam.rate();
            const double m = static_cast<double>(fam.M);
            return transform(summary.samples_group[0], c * m * std::log(m), c * m,
                             std::log(fam.nu1));
        }
        case Normalization::T2: {
            const ScalingFamily& fam = need_family();
            if (summary.samples_group.empty())
                throw ConfigError("group samples were not retained");
            const double c = fam.nu1 / fam.lambda_d() + fam.nu2;
            const double m = static_cast<double>(fam.M);
            return transform(summary.samples_group[1], c * m * std::log(m), c * m,
                             std::log(fam.nu2));
        }
        case Normalization::Total: {
            const ScalingFamily& fam = need_family();
            if (summary.samples_total.empty())
                throw ConfigError("total-time samples were not retained");
            const double c = fam.rate();
            const double m = static_cast<double>(fam.M);
            return transform(summary.samples_total, c * m * std::log(m), c * m,
                             std::log(fam.nu1));
        }
        case Normalization::UniformPool: {
            if (g != 1) throw ConfigError("uniform normalization needs a one-group pool");
            if (summary.samples_total.empty())
                throw ConfigError("total-time samples were not retained");
            const double n = static_cast<double>(summary.mixture[0].count);
            return transform(summary.samples_total, n * std::log(n), n, 0.0);
        }
        case Normalization::ThetaPool: {
            if (g != 2) throw ConfigError("theta normalization needs a two-group pool");
            if (summary.samples_total.empty())
                throw ConfigError("total-time samples were not retained");
            int single = -1;
            for (int j = 0; j < 2; ++j)
                if (summary.mixture[j].count == 1) single = j;
            if (single < 0)
                throw ConfigError("theta normalization needs a one-coupon group");
            const double theta = rational_to_double(summary.mixture[single].prob);
            const double n = static_cast<double>(summary.mixture[1 - single].count);
            std::vector<double> out;
            out.reserve(summary.samples_total.size());
            for (double x : summary.samples_total)
                out.push_back(((1.0 - theta) * x - n * std::log(n)) / n);
            return out;
        }
    }
    throw ConfigError("unknown normalization");
}

}  // namespace couponmix::montecarlo
