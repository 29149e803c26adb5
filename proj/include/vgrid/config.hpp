#pragma once

#include <string>

#include "json.hpp"
#include "vgrid/pipeline.hpp"

namespace vgrid {

PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);
nlohmann::json config_to_json(const PipelineConfig& config);

// Content hash (hex) of the canonicalized config. Timestamps never enter the
// manifest, so equal configs hash equal across runs.
std::string config_digest(const PipelineConfig& config);

ResidualMode residual_mode_from_string(const std::string& s);
std::string to_string(ResidualMode mode);

}  // namespace vgrid
