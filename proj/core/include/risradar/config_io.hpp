#pragma once

/// Versioned JSON scene/training configuration. Unknown keys are hard errors;
/// validation failures name the offending field path.

#include <filesystem>
#include <string>

#include "risradar/risopt.hpp"
#include "risradar/rvmap.hpp"
#include "risradar/scene.hpp"

namespace risradar {

inline constexpr int kConfigSchemaVersion = 1;

struct ToolkitConfig {
  SceneConfig scene;
  TrainHyper train;
  double train_beta = 0.8;
  ExtractOptions detection;
};

ToolkitConfig load_config(const std::filesystem::path& path);
ToolkitConfig parse_config(const std::string& json_text, const std::string& origin = "<string>");
std::string config_to_json(const ToolkitConfig& cfg);

}  // namespace risradar
