#include "couponmix/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace couponmix::io {

namespace {

Rational prob_from_json(const nlohmann::json& v) {
    if (v.is_string()) return rational_from_string(v.get<std::string>());
    if (v.is_number_integer()) return rational_from_int(v.get<std::int64_t>());
    if (v.is_number_float()) return rational_from_double(v.get<double>());
    throw ConfigError("probability must be a number or a 'num/den' string");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

}  // namespace

GroupMixture mixture_from_json(const nlohmann::json& j) {
    if (!j.contains("groups") || !j["groups"].is_array() || j["groups"].empty())
        throw ConfigError("config needs a non-empty 'groups' array");
    std::vector<Group> groups;
    for (const auto& e : j["groups"]) {
        if (!e.contains("count") || !e.contains("prob"))
            throw ConfigError("each group needs 'count' and 'prob'");
        groups.push_back(Group{e["count"].get<std::int64_t>(), prob_from_json(e["prob"])});
    }
    return GroupMixture(std::move(groups));
}

ScalingFamily scaling_from_json(const nlohmann::json& j) {
    const auto& s = j.at("scaling");
    ScalingFamily f;
    f.nu1 = s.at("nu1").get<int>();
    f.nu2 = s.at("nu2").get<int>();
    f.lambda = prob_from_json(s.at("lambda"));
    f.M = s.at("M").get<std::int64_t>();
    validate_scaling(f);
    return f;
}

ParsedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    ParsedConfig cfg;
    if (j.contains("scaling")) {
        cfg.scaling = scaling_from_json(j);
        cfg.mixture = mixture_from_scaling(*cfg.scaling);
    } else {
        cfg.mixture = mixture_from_json(j);
    }
    return cfg;
}

GroupMixture parse_inline_groups(const std::string& text) {
    std::vector<Group> groups;
    for (const std::string& part : split(text, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos)
            throw ConfigError("group spec '" + part + "' is not count:prob");
        Group g;
        try {
            g.count = std::stoll(part.substr(0, colon));
        } catch (const std::exception&) {
            throw ConfigError("bad count in group spec '" + part + "'");
        }
        g.prob = rational_from_string(part.substr(colon + 1));
        groups.push_back(std::move(g));
    }
    return GroupMixture(std::move(groups));
}

ScalingFamily parse_inline_scaling(const std::string& text) {
    auto parts = split(text, ',');
    if (parts.size() != 4)
        throw ConfigError("scaling spec must be nu1,nu2,lambda,M");
    ScalingFamily f;
    try {
        f.nu1 = std::stoi(parts[0]);
        f.nu2 = std::stoi(parts[1]);
        f.M = std::stoll(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("bad integer in scaling spec '" + text + "'");
    }
    f.lambda = rational_from_string(parts[2]);
    validate_scaling(f);
    return f;
}

nlohmann::json summary_to_json(const montecarlo::EmpiricalSummary& s) {
    // the worker count is deliberately not serialized: the summary contract
    // is that it does not depend on the parallel layout
    nlohmann::json j;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["first_count"] = s.first_count;
    j["first_freq"] = s.first_freq;

    auto stats_json = [](const montecarlo::MomentStats& m) {
        nlohmann::json e;
        e["n"] = m.n;
        e["mean"] = m.mean;
        e["mean_stderr"] = m.stderr_mean();
        e["variance"] = m.variance();
        e["variance_stderr"] = m.stderr_variance();
        return e;
    };
    j["group_time"] = nlohmann::json::array();
    for (const auto& m : s.group_time) j["group_time"].push_back(stats_json(m));
    j["total_time"] = stats_json(s.total_time);
    j["retained_total"] = s.samples_total.size();
    j["retained_groups"] = s.samples_group.empty() ? 0 : s.samples_group[0].size();
    return j;
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace couponmix::io
