#include "celltide/serialize.hpp"

#include <cmath>

#include "celltide/error.hpp"

namespace celltide {

nlohmann::json parse_model_json(std::string_view text, std::string_view expected_type) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::Parse, "model file: top level must be an object");
  const auto type = require_string(doc, "type");
  if (type != expected_type) {
    fail(ErrorCode::Parse, "type: expected \"" + std::string(expected_type) + "\", found \"" + type + "\"");
  }
  return doc;
}

const nlohmann::json& require_field(const nlohmann::json& obj, const std::string& name) {
  const auto it = obj.find(name);
  if (it == obj.end()) fail(ErrorCode::Parse, name + ": missing field");
  return *it;
}

long long require_int(const nlohmann::json& obj, const std::string& name) {
  const auto& v = require_field(obj, name);
  if (!v.is_number_integer()) fail(ErrorCode::Parse, name + ": expected an integer");
  return v.get<long long>();
}

std::size_t require_count(const nlohmann::json& obj, const std::string& name) {
  const long long v = require_int(obj, name);
  if (v < 1) fail(ErrorCode::Parse, name + ": expected a positive integer");
  return static_cast<std::size_t>(v);
}

double require_number(const nlohmann::json& obj, const std::string& name) {
  const auto& v = require_field(obj, name);
  if (!v.is_number()) fail(ErrorCode::Parse, name + ": expected a number");
  return v.get<double>();
}

std::string require_string(const nlohmann::json& obj, const std::string& name) {
  const auto& v = require_field(obj, name);
  if (!v.is_string()) fail(ErrorCode::Parse, name + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> require_array(const nlohmann::json& obj, const std::string& path, const std::string& name) {
  const std::string where = path.empty() ? name : path + "." + name;
  const auto it = obj.find(name);
  if (it == obj.end()) fail(ErrorCode::Parse, where + ": missing field");
  if (!it->is_array()) fail(ErrorCode::Parse, where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& e : *it) {
    if (!e.is_number()) fail(ErrorCode::Parse, where + ": expected an array of numbers");
    const double d = e.get<double>();
    if (!std::isfinite(d)) fail(ErrorCode::Parse, where + ": non-finite value");
    out.push_back(d);
  }
  return out;
}

void read_tensor(const nlohmann::json& obj, const std::string& path, const std::string& name, std::span<double> out) {
  const auto values = require_array(obj, path, name);
  if (values.size() != out.size()) {
    fail(ErrorCode::Parse, path + "." + name + ": expected " + std::to_string(out.size()) + " values, found " +
                               std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), out.begin());
}

nlohmann::json scaler_to_json(const dataset::ScalerParams& scaler) {
  return nlohmann::json{{"min", scaler.min}, {"max", scaler.max}};
}

dataset::ScalerParams scaler_from_json(const nlohmann::json& doc) {
  const auto& s = require_field(doc, "scaler");
  if (!s.is_object()) fail(ErrorCode::Parse, "scaler: expected an object");
  dataset::ScalerParams scaler{require_number(s, "min"), require_number(s, "max")};
  if (!(scaler.max > scaler.min)) fail(ErrorCode::Parse, "scaler: max must exceed min");
  return scaler;
}

}  // namespace celltide
