#pragma once

#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "celltide/dataset.hpp"

// Shared helpers for the JSON model files. Errors name the offending field.
namespace celltide {

nlohmann::json parse_model_json(std::string_view text, std::string_view expected_type);

const nlohmann::json& require_field(const nlohmann::json& obj, const std::string& name);
std::size_t require_count(const nlohmann::json& obj, const std::string& name);
long long require_int(const nlohmann::json& obj, const std::string& name);
double require_number(const nlohmann::json& obj, const std::string& name);
std::string require_string(const nlohmann::json& obj, const std::string& name);
std::vector<double> require_array(const nlohmann::json& obj, const std::string& path, const std::string& name);

/// Copies obj[name] into `out`, which fixes the expected length.
void read_tensor(const nlohmann::json& obj, const std::string& path, const std::string& name, std::span<double> out);

nlohmann::json scaler_to_json(const dataset::ScalerParams& scaler);
dataset::ScalerParams scaler_from_json(const nlohmann::json& doc);

}  // namespace celltide
