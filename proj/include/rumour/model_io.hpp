#pragma once

#include <filesystem>
#include <string>

#include "rumour/classifiers.hpp"

namespace rumour {

inline constexpr std::string_view kModelSchema = "rumour-model.v1";

/// JSON object echoing the training config.
std::string config_json(const TrainConfig& config);

/// Model file: algorithm tag, config echo, standardisation vectors and
/// parameters. Reals use the 9-significant-digit rule of embedding stores.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace rumour
