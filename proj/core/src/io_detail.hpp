#pragma once

#include <json.hpp>

#include "vagus/pipeline.hpp"
#include "vagus/sweep.hpp"

// Internal bridge between config.cpp (JSON forms) and csvio.cpp (file
// layout). Not installed.
namespace vagus::detail {

nlohmann::ordered_json sweep_config_json(const SweepConfig& cfg);
nlohmann::ordered_json trial_config_json(const TrialConfig& cfg);

}  // namespace vagus::detail
