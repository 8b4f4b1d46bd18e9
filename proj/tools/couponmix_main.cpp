// couponmix: exact, asymptotic, and Monte Carlo answers for coupon
// collection from a mixture of uniform coupon groups.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "couponmix/asymptotics.hpp"
#include "couponmix/exact.hpp"
#include "couponmix/io.hpp"
#include "couponmix/model.hpp"
#include "couponmix/montecarlo.hpp"
#include "couponmix/special.hpp"
#include "couponmix/stats.hpp"

namespace {

using namespace couponmix;

struct SourceFlags {
    std::string config_path;
    std::string groups_inline;
    std::string scaling_inline;
    bool swap_groups = false;
};

struct Resolved {
    GroupMixture mixture;
    std::optional<ScalingFamily> scaling;
};

Resolved resolve_source(const SourceFlags& src) {
    std::optional<ScalingFamily> fam;
    std::optional<GroupMixture> mix;
    int provided = !src.config_path.empty() + !src.groups_inline.empty() +
                   !src.scaling_inline.empty();
    if (provided != 1)
        throw ConfigError("give exactly one of --config, --groups, --scaling");

    if (!src.config_path.empty()) {
        io::ParsedConfig cfg = io::load_config_file(src.config_path);
        fam = cfg.scaling;
        mix = cfg.mixture;
    } else if (!src.groups_inline.empty()) {
        mix = io::parse_inline_groups(src.groups_inline);
    } else {
        fam = io::parse_inline_scaling(src.scaling_inline);
    }

    if (src.swap_groups) {
        if (fam) {
            fam = fam->swapped();
            mix.reset();
        } else if (mix && mix->group_count() == 2) {
            mix = GroupMixture({mix->groups()[1], mix->groups()[0]});
        } else {
            throw ConfigError("--swap-groups needs a two-group pool");
        }
    }
    if (!mix) mix = mixture_from_scaling(*fam);
    return {*mix, fam};
}

std::uint64_t parse_count(const std::string& text, const char* what) {
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ConfigError(std::string("bad ") + what + " '" + text + "'");
    }
    if (!(v >= 1.0) || v > 9e18 || v != std::floor(v))
        throw ConfigError(std::string(what) + " must be a positive integer, got '" +
                          text + "'");
    return static_cast<std::uint64_t>(v);
}

int cap_workers(int requested) {
    if (requested < 1) throw ConfigError("--workers must be >= 1");
    if (const char* env = std::getenv("COUPON_MIXTURE_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) return std::min(requested, cap);
    }
    return requested;
}

std::string fmt(double x) { return io::format_real(x); }

// ---------------------------------------------------------------- prob-first

struct ProbFirstArgs {
    SourceFlags src;
    int group = 1;
    std::string method = "sum";
    std::string mode = "auto";
    std::string trials = "100000";
    std::uint64_t seed = 0;
    int workers = 1;
};

exact::EvalMode parse_mode(const std::string& mode) {
    if (mode == "rational") return exact::EvalMode::Rational;
    if (mode == "float") return exact::EvalMode::CompensatedFloat;
    if (mode == "auto") return exact::EvalMode::Auto;
    throw ConfigError("unknown mode '" + mode + "' (rational|float|auto)");
}

struct RouteValue {
    std::string method;
    double value;
    std::string display;  // rational string when exact
    std::string detail;
};

RouteValue route_sum(const GroupMixture& m, int group, exact::EvalMode mode) {
    exact::FirstDetectionResult r = exact::first_detection_prob_sum(m, group, mode);
    RouteValue out{"sum", r.value, fmt(r.value), "route=" + r.route};
    if (r.exact) out.display = rational_to_string(*r.exact);
    if (r.route == "sum-float")
        out.detail += ";cancellation=" + fmt(r.cancellation_ratio);
    return out;
}

RouteValue route_dp(const GroupMixture& m, int group, exact::EvalMode mode) {
    if (mode != exact::EvalMode::CompensatedFloat && m.cheap_rational()) {
        Rational v = exact::first_detection_prob_dp(m, group);
        return {"dp", rational_to_double(v), rational_to_string(v), "route=dp-rational"};
    }
    double v = exact::first_detection_prob_dp_float(m, group);
    return {"dp", v, fmt(v), "route=dp-float"};
}

RouteValue route_integral(const GroupMixture& m, int group, exact::IntegralForm form) {
    double p = exact::p_t1_before_t2_integral(m, form);
    double v = (group == 1) ? p : 1.0 - p;
    return {"integral:" + exact::integral_form_name(form), v, fmt(v), "quadrature"};
}

RouteValue route_mc(const GroupMixture& m, int group, std::uint64_t trials,
                    std::uint64_t seed, int workers) {
    montecarlo::SimConfig cfg{seed, trials, workers, montecarlo::Retain::None};
    montecarlo::EmpiricalSummary s = montecarlo::estimate(m, cfg);
    double f = s.first_freq[group - 1];
    double se = std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
    return {"mc", f, fmt(f), "stderr=" + fmt(se)};
}

int run_prob_first(const ProbFirstArgs& a) {
    Resolved r = resolve_source(a.src);
    const GroupMixture& m = r.mixture;
    if (a.group < 1 || a.group > m.group_count())
        throw ConfigError("--group out of range");
    const int workers = cap_workers(a.workers);

    std::vector<RouteValue> rows;
    if (a.method == "all") {
        rows.push_back(route_sum(m, a.group, parse_mode(a.mode)));
        rows.push_back(route_dp(m, a.group, parse_mode(a.mode)));
        if (m.group_count() == 2)
            rows.push_back(route_integral(m, a.group, exact::IntegralForm::Ratio));
        rows.push_back(route_mc(m, a.group, parse_count(a.trials, "--trials"), a.seed, workers));
    } else if (a.method == "sum") {
        rows.push_back(route_sum(m, a.group, parse_mode(a.mode)));
    } else if (a.method == "dp") {
        rows.push_back(route_dp(m, a.group, parse_mode(a.mode)));
    } else if (a.method.rfind("integral:", 0) == 0) {
        rows.push_back(route_integral(m, a.group,
                                      exact::integral_form_from_string(a.method.substr(9))));
    } else if (a.method == "integral") {
        rows.push_back(route_integral(m, a.group, exact::IntegralForm::Ratio));
    } else if (a.method == "mc") {
        rows.push_back(route_mc(m, a.group, parse_count(a.trials, "--trials"), a.seed, workers));
    } else {
        throw ConfigError("unknown method '" + a.method + "'");
    }

    std::cout << "method,value,detail\n";
    for (const RouteValue& row : rows)
        std::cout << row.method << "," << row.display << "," << row.detail << "\n";
    if (rows.size() > 1) {
        double max_delta = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t k = i + 1; k < rows.size(); ++k)
                max_delta = std::max(max_delta, std::fabs(rows[i].value - rows[k].value));
        std::cout << "max-pairwise-delta," << fmt(max_delta) << ",\n";
    }
    return 0;
}

// ------------------------------------------------------------------- moments

struct MomentsArgs {
    SourceFlags src;
    double r = 1.0;
    std::string which = "T";
    std::string method = "quadrature";
    std::string detail = "harmonic";
    std::string trials = "100000";
    std::uint64_t seed = 0;
    int workers = 1;
};

int run_moments(const MomentsArgs& a) {
    Resolved res = resolve_source(a.src);
    const GroupMixture& m = res.mixture;
    if (a.which != "T" && a.which != "T1" && a.which != "T2")
        throw ConfigError("--which must be T1, T2, or T");
    const int group = (a.which == "T2") ? 2 : 1;
    if (a.which != "T" && group > m.group_count())
        throw ConfigError("pool has no group " + std::to_string(group));

    std::cout << "which,r,method,value,detail\n";
    auto emit = [&](const std::string& value, const std::string& detail) {
        std::cout << a.which << "," << fmt(a.r) << "," << a.method << "," << value << ","
                  << detail << "\n";
    };

    if (a.method == "quadrature") {
        double v = (a.which == "T") ? exact::mixture_moment(m, a.r)
                                    : exact::group_detection_moment(m, group, a.r);
        emit(fmt(v), "adaptive");
        return 0;
    }
    if (a.method == "subset") {
        if (a.which == "T") {
            exact::RisingMomentQuery q;
            q.r = a.r;
            for (const Group& g : m.groups())
                for (std::int64_t i = 0; i < g.count; ++i)
                    q.q.push_back(rational_to_double(g.prob));
            double v = exact::rising_moment_subset_sum(q);
            std::string detail = "terms=2^" + std::to_string(q.q.size());
            double rounded = std::round(a.r);
            if (std::fabs(a.r - rounded) == 0.0 && rounded >= 1 && m.cheap_rational()) {
                std::vector<Rational> qr;
                for (const Group& g : m.groups())
                    for (std::int64_t i = 0; i < g.count; ++i) qr.push_back(g.prob);
                Rational ev = exact::rising_moment_subset_sum_exact(
                    qr, static_cast<int>(rounded));
                detail += ";exact=" + rational_to_string(ev);
            }
            emit(fmt(v), detail);
        } else {
            emit(fmt(exact::group_detection_moment_subset(m, group, a.r)), "binomial");
        }
        return 0;
    }
    if (a.method == "asymptotic") {
        if (!res.scaling)
            throw ConfigError("asymptotic moments need a scaling configuration");
        const ScalingFamily& f = *res.scaling;
        namespace asym = couponmix::asymptotics;
        if (a.r == 1.0) {
            if (a.which == "T") {
                asym::ScalePrediction p = asym::mean_t_asymptotic(f);
                emit(fmt(p.value), "error-order=" + p.error_order);
            } else {
                asym::Detail d = (a.detail == "expanded") ? asym::Detail::Expanded
                                                          : asym::Detail::Harmonic;
                double v = (a.which == "T1") ? asym::mean_t1_asymptotic(f, d)
                                             : asym::mean_t2_asymptotic(f, d);
                double alt = (a.which == "T1")
                                 ? asym::mean_t1_asymptotic(f, asym::Detail::Expanded)
                                 : asym::mean_t2_asymptotic(f, asym::Detail::Expanded);
                emit(fmt(v), "expanded-form=" + fmt(alt));
            }
        } else if (a.r == 2.0) {
            if (a.which == "T") {
                asym::ScalePrediction p = asym::second_rising_t_asymptotic(f);
                emit(fmt(p.value), "error-order=" + p.error_order + ";rising");
            } else {
                double v = (a.which == "T1") ? asym::second_rising_t1_asymptotic(f)
                                             : asym::second_rising_t2_asymptotic(f);
                emit(fmt(v), "rising");
            }
        } else {
            asym::WhichTime w = (a.which == "T")    ? asym::WhichTime::Total
                                : (a.which == "T1") ? asym::WhichTime::T1
                                                    : asym::WhichTime::T2;
            emit(fmt(asym::moment_r_leading(f, a.r, w)), "leading-order");
        }
        return 0;
    }
    if (a.method == "mc") {
        const int workers = cap_workers(a.workers);
        const std::uint64_t trials = parse_count(a.trials, "--trials");
        if (a.r == 1.0) {
            montecarlo::SimConfig cfg{a.seed, trials, workers, montecarlo::Retain::None};
            montecarlo::EmpiricalSummary s = montecarlo::estimate(m, cfg);
            const montecarlo::MomentStats& st =
                (a.which == "T") ? s.total_time : s.group_time[group - 1];
            emit(fmt(st.mean), "stderr=" + fmt(st.stderr_mean()));
        } else {
            if (trials > montecarlo::kSampleCap)
                throw ConfigError("Monte Carlo moments with r != 1 need trials <= 10^6");
            montecarlo::Retain keep =
                (a.which == "T") ? montecarlo::Retain::Total : montecarlo::Retain::All;
            montecarlo::SimConfig cfg{a.seed, trials, workers, keep};
            montecarlo::EmpiricalSummary s = montecarlo::estimate(m, cfg);
            const std::vector<double>& xs =
                (a.which == "T") ? s.samples_total : s.samples_group[group - 1];
            montecarlo::MomentStats acc;
            for (double x : xs)
                acc.add(std::exp(std::lgamma(x + a.r) - std::lgamma(x)));
            emit(fmt(acc.mean), "stderr=" + fmt(acc.stderr_mean()) + ";rising");
        }
        return 0;
    }
    throw ConfigError("unknown method '" + a.method + "'");
}

// --------------------------------------------------------------- convergence

struct ConvergenceArgs {
    std::string study;
    std::string lambda = "2";
    int nu1 = 1;
    int nu2 = 1;
    std::string m_grid = "10,20,40";
    std::string trials = "100000";
    std::string samples = "10000";
    std::uint64_t seed = 1;
    int workers = 8;
    bool swap_groups = false;
};

std::vector<std::int64_t> parse_grid(const std::string& text) {
    std::vector<std::int64_t> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            grid.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw ConfigError("bad M value '" + item + "' in --M-grid");
        }
        if (grid.back() < 1) throw ConfigError("--M-grid entries must be >= 1");
    }
    if (grid.empty()) throw ConfigError("--M-grid is empty");
    return grid;
}

int run_convergence(const ConvergenceArgs& a) {
    ScalingFamily base;
    base.nu1 = a.nu1;
    base.nu2 = a.nu2;
    base.lambda = rational_from_string(a.lambda);
    base.M = 1;
    if (a.swap_groups) base = base.swapped();
    validate_scaling(base);
    if (base.lambda <= 1)
        throw ConfigError(
            "convergence studies need lambda > 1: make group 1 the rare-coupon "
            "group (--swap-groups relabels a two-group configuration)");
    const int workers = cap_workers(a.workers);
    const std::uint64_t trials = parse_count(a.trials, "--trials");
    const std::uint64_t samples = parse_count(a.samples, "--samples");
    const std::vector<std::int64_t> grid = parse_grid(a.m_grid);

    auto family_at = [&](std::int64_t M) {
        ScalingFamily f = base;
        f.M = M;
        return f;
    };

    if (a.study == "thm2") {
        std::cout << "M,exact,prediction,ratio\n";
        for (std::int64_t M : grid) {
            ScalingFamily f = family_at(M);
            double ex = exact::p_t1_before_t2_integral(mixture_from_scaling(f),
                                                       exact::IntegralForm::Ratio);
            double pred = asymptotics::p_first_asymptotic(f);
            std::cout << M << "," << fmt(ex) << "," << fmt(pred) << "," << fmt(ex / pred)
                      << "\n";
        }
        return 0;
    }
    if (a.study == "thm6") {
        std::cout << "M,exact,prediction,ratio\n";
        for (std::int64_t M : grid) {
            ScalingFamily f = family_at(M);
            double ex = exact::mixture_moment(mixture_from_scaling(f), 1.0);
            double pred = asymptotics::mean_t_asymptotic(f).value;
            std::cout << M << "," << fmt(ex) << "," << fmt(pred) << "," << fmt(ex / pred)
                      << "\n";
        }
        return 0;
    }
    if (a.study == "cor4") {
        std::cout << "M,estimate,stderr,prediction,ratio\n";
        for (std::int64_t M : grid) {
            ScalingFamily f = family_at(M);
            montecarlo::SimConfig cfg{a.seed, trials, workers, montecarlo::Retain::None};
            montecarlo::EmpiricalSummary s =
                montecarlo::estimate(mixture_from_scaling(f), cfg);
            double est = s.total_time.variance();
            double pred = asymptotics::var_t_asymptotic(f);
            std::cout << M << "," << fmt(est) << "," << fmt(s.total_time.stderr_variance())
                      << "," << fmt(pred) << "," << fmt(est / pred) << "\n";
        }
        return 0;
    }
    if (a.study == "gumbel") {
        std::cout << "M,samples,ks_d,ks_critical_05,below_critical\n";
        for (std::int64_t M : grid) {
            ScalingFamily f = family_at(M);
            montecarlo::SimConfig cfg{a.seed, samples, workers, montecarlo::Retain::Total};
            montecarlo::EmpiricalSummary s =
                montecarlo::estimate(mixture_from_scaling(f), cfg);
            std::vector<double> ys =
                montecarlo::normalized_samples(s, montecarlo::Normalization::Total, f);
            stats::KsResult ks = stats::ks_statistic(std::move(ys), stats::gumbel_cdf);
            std::cout << M << "," << ks.n << "," << fmt(ks.d) << "," << fmt(ks.critical_05)
                      << "," << (ks.d < ks.critical_05 ? 1 : 0) << "\n";
        }
        return 0;
    }
    throw ConfigError("unknown study '" + a.study + "' (thm2|thm6|cor4|gumbel)");
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
    SourceFlags src;
    std::string trials = "100000";
    std::uint64_t seed = 0;
    int workers = 1;
    std::string retain = "none";
    std::string dump_path;
};

int run_simulate(const SimulateArgs& a) {
    Resolved r = resolve_source(a.src);
    montecarlo::Retain keep;
    if (a.retain == "none")
        keep = montecarlo::Retain::None;
    else if (a.retain == "T")
        keep = montecarlo::Retain::Total;
    else if (a.retain == "all")
        keep = montecarlo::Retain::All;
    else
        throw ConfigError("--retain must be none, T, or all");
    if (!a.dump_path.empty() && keep == montecarlo::Retain::None)
        keep = montecarlo::Retain::Total;

    montecarlo::SimConfig cfg{a.seed, parse_count(a.trials, "--trials"),
                              cap_workers(a.workers), keep};
    montecarlo::EmpiricalSummary s = montecarlo::estimate(r.mixture, cfg);

    if (!a.dump_path.empty()) {
        std::ofstream out(a.dump_path);
        if (!out) throw std::ios_base::failure("cannot open '" + a.dump_path + "'");
        for (double x : s.samples_total)
            out << static_cast<long long>(x) << "\n";
        if (!out) throw std::ios_base::failure("write failed for '" + a.dump_path + "'");
    }

    std::cout << io::summary_to_json(s).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupon collection from a mixture of uniform coupon groups"};
    app.require_subcommand(1);

    auto add_source = [](CLI::App* cmd, SourceFlags& src) {
        cmd->add_option("--config", src.config_path, "JSON config file");
        cmd->add_option("--groups", src.groups_inline,
                        "inline pool, count:prob[,count:prob...] with exact rationals");
        cmd->add_option("--scaling", src.scaling_inline, "inline family, nu1,nu2,lambda,M");
        cmd->add_flag("--swap-groups", src.swap_groups, "relabel the two groups");
    };

    ProbFirstArgs pf;
    CLI::App* c1 = app.add_subcommand(
        "prob-first", "probability that a group is the first one fully detected");
    add_source(c1, pf.src);
    c1->add_option("--group", pf.group, "group index, 1-based");
    c1->add_option("--method", pf.method,
                   "sum|dp|integral:direct|integral:ratio|integral:ratio-root|"
                   "integral:exponential|mc|all");
    c1->add_option("--mode", pf.mode, "rational|float|auto");
    c1->add_option("--trials", pf.trials, "Monte Carlo trials");
    c1->add_option("--seed", pf.seed, "Monte Carlo seed");
    c1->add_option("--workers", pf.workers, "Monte Carlo workers");

    MomentsArgs mo;
    CLI::App* c2 = app.add_subcommand(
        "moments", "rising moments E[X^(r)] of detection times (columns: which,r,method,"
                   "value,detail)");
    add_source(c2, mo.src);
    c2->add_option("--r", mo.r, "moment order, r > 0");
    c2->add_option("--which", mo.which, "T1|T2|T");
    c2->add_option("--method", mo.method, "quadrature|subset|asymptotic|mc");
    c2->add_option("--detail", mo.detail, "harmonic|expanded (asymptotic means)");
    c2->add_option("--trials", mo.trials, "Monte Carlo trials");
    c2->add_option("--seed", mo.seed, "Monte Carlo seed");
    c2->add_option("--workers", mo.workers, "Monte Carlo workers");

    ConvergenceArgs cv;
    CLI::App* c3 = app.add_subcommand(
        "convergence",
        "exact-vs-prediction tables over an M grid (CSV; studies: thm2 = first-detection "
        "probability decay, thm6 = total-collection mean, cor4 = total-collection "
        "variance, gumbel = limit-distribution fit)");
    c3->add_option("--study", cv.study, "thm2|thm6|cor4|gumbel")->required();
    c3->add_option("--lambda", cv.lambda, "probability ratio p2/p1, rational or decimal");
    c3->add_option("--nu1", cv.nu1, "group 1 size multiplier");
    c3->add_option("--nu2", cv.nu2, "group 2 size multiplier");
    c3->add_option("--M-grid", cv.m_grid, "comma-separated M values");
    c3->add_option("--trials", cv.trials, "Monte Carlo trials per row (cor4)");
    c3->add_option("--samples", cv.samples, "retained samples per row (gumbel)");
    c3->add_option("--seed", cv.seed, "Monte Carlo seed");
    c3->add_option("--workers", cv.workers, "Monte Carlo workers");
    c3->add_flag("--swap-groups", cv.swap_groups, "relabel the two groups");

    SimulateArgs si;
    CLI::App* c4 = app.add_subcommand("simulate", "seeded simulation summary as JSON");
    add_source(c4, si.src);
    c4->add_option("--trials", si.trials, "number of trials");
    c4->add_option("--seed", si.seed, "stream seed");
    c4->add_option("--workers", si.workers, "worker threads");
    c4->add_option("--retain", si.retain, "none|T|all");
    c4->add_option("--dump", si.dump_path, "write retained total times, one per line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c1->parsed()) return run_prob_first(pf);
        if (c2->parsed()) return run_moments(mo);
        if (c3->parsed()) return run_convergence(cv);
        if (c4->parsed()) return run_simulate(si);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical refusal: " << e.what() << "\n";
        return 3;
    } catch (const BudgetError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 4;
    }
}
