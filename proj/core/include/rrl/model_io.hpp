#pragma once

#include "rrl/model.hpp"

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace rrl {

/// Model file layout: {"S","A","H","kernel","reward","legal","divergence":{"kind","sigma"},"initial_state"}
/// with kernel[h][s][a][s'], reward[h][s][a], legal[h][s][a] as nested arrays.
nlohmann::json model_to_json(const FiniteRMDP& model);
FiniteRMDP model_from_json(const nlohmann::json& doc);

void save_model(const FiniteRMDP& model, const std::filesystem::path& path);
FiniteRMDP load_model(const std::filesystem::path& path);

}  // namespace rrl
