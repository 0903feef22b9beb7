#include "phantom/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace phantom {

namespace {

using nlohmann::json;

int require_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ValidationError(where + ": missing or non-integer field '" + key + "'");
  return j[key].get<int>();
}

double require_density(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError(where + ": missing or non-numeric field '" + key + "'");
  double d = j[key].get<double>();
  if (d <= 0.0 || d > 1.0)
    throw ValidationError(where + ": '" + key + "' must be in (0, 1]");
  return d;
}

}  // namespace

std::vector<LayerSpec> parse_model(const std::string& json_text,
                                   const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array())
    throw ValidationError(origin + ": expected an object with a 'layers' array");
  const auto& layers = j["layers"];
  if (layers.empty()) throw ValidationError(origin + ": model has no layers");

  std::vector<LayerSpec> model;
  model.reserve(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& lj = layers[i];
    std::string where = origin + ": layer " + std::to_string(i);
    if (!lj.is_object()) throw ValidationError(where + ": expected an object");
    LayerSpec spec;
    spec.name = lj.value("name", "layer" + std::to_string(i));
    if (!lj.contains("kind") || !lj["kind"].is_string())
      throw ValidationError(where + ": missing 'kind'");
    spec.kind = layer_kind_from_string(lj["kind"].get<std::string>());
    spec.h = require_int(lj, "H", where);
    spec.w = require_int(lj, "W", where);
    spec.c_in = require_int(lj, "C_in", where);
    spec.c_out = require_int(lj, "C_out", where);
    spec.k = lj.contains("K") ? require_int(lj, "K", where)
                              : (spec.kind == LayerKind::pointwise ? 1 : 3);
    spec.stride = lj.contains("stride") ? require_int(lj, "stride", where) : 1;
    spec.weight_density = require_density(lj, "weight_density", where);
    spec.act_density = require_density(lj, "activation_density", where);
    spec.no_relu = lj.value("no_relu", false);
    try {
      spec.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    model.push_back(std::move(spec));
  }
  return model;
}

std::vector<LayerSpec> load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open model file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model(ss.str(), path);
}

}  // namespace phantom
