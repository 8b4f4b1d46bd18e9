#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "couponmix/model.hpp"
#include "couponmix/montecarlo.hpp"

namespace couponmix::io {

struct ParsedConfig {
    std::optional<GroupMixture> mixture;
    std::optional<ScalingFamily> scaling;
};

// {"groups":[{"count":int,"prob":"num/den"|float}, ...]} — rational strings
// are parsed exactly, JSON numbers are converted dyadically.
GroupMixture mixture_from_json(const nlohmann::json& j);

// {"scaling":{"nu1":int,"nu2":int,"lambda":float|"num/den","M":int}}
ScalingFamily scaling_from_json(const nlohmann::json& j);

ParsedConfig load_config_file(const std::string& path);

// Inline forms used by the CLI: "count:prob[,count:prob...]" and
// "nu1,nu2,lambda,M".
GroupMixture parse_inline_groups(const std::string& text);
ScalingFamily parse_inline_scaling(const std::string& text);

nlohmann::json summary_to_json(const montecarlo::EmpiricalSummary& s);

// 12 significant digits, the fixed print format for reals.
std::string format_real(double x);

}  // namespace couponmix::io
