#pragma once

#include <json.hpp>

#include "c2m/pipeline.hpp"

namespace c2m {

// JSON mappings for configuration records. from_json accepts partial
// objects (missing keys keep their current value) and rejects unknown keys
// with ValidationError.

void to_json(nlohmann::json& j, const RmspropConfig& c);
void from_json(const nlohmann::json& j, RmspropConfig& c);
void to_json(nlohmann::json& j, const CemConfig& c);
void from_json(const nlohmann::json& j, CemConfig& c);
void to_json(nlohmann::json& j, const CriticConfig& c);
void from_json(const nlohmann::json& j, CriticConfig& c);
void to_json(nlohmann::json& j, const GaeTrainConfig& c);
void from_json(const nlohmann::json& j, GaeTrainConfig& c);
void to_json(nlohmann::json& j, const ClusterNetShape& c);
void from_json(const nlohmann::json& j, ClusterNetShape& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace c2m
