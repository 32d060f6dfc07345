#pragma once

#include "json.hpp"
#include "rtfnet/dataset.hpp"

namespace rtfnet {

nlohmann::json to_json(const GenConfig& config);
GenConfig gen_config_from_json(const nlohmann::json& j);

const char* damping_name(DampingModel damping);
DampingModel parse_damping(const std::string& name);

}  // namespace rtfnet
