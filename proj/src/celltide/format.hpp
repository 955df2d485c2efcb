#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace celltide {

/// 17 significant digits: enough for a bit-exact round trip of any double.
std::string format_double(double value);

/// Serializes JSON like nlohmann::json::dump(2), but prints every float with
/// format_double so model files round-trip exactly.
std::string dump_json(const nlohmann::json& value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace celltide
