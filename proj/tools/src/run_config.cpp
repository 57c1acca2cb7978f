#include "run_config.hpp"

#include <iterator>
#include <sstream>

namespace mallows::cli {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw CLI::ConfigError("config key '" + key + "' must be a scalar or a flat array");
}

}  // namespace

Json echo(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  j["q"] = optional_json(c.q);
  j["n"] = optional_json(c.n);
  j["sizes"] = c.sizes;
  j["reps"] = optional_json(c.reps);
  j["target_samples"] = optional_json(c.target_samples);
  j["imax"] = optional_json(c.i_max);
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["chunks"] = c.chunks;
  j["out"] = c.out;
  j["format"] = c.format;
  j["profile"] = c.profile;
  j["stats"] = c.stats;
  j["perm"] = c.perm;
  j["kind"] = c.kind;
  j["tol"] = c.tol;
  j["threshold"] = optional_json(c.threshold);
  j["only"] = c.only;
  j["config"] = c.config_file;
  return j;
}

std::vector<CLI::ConfigItem> FlexibleConfig::from_config(std::istream& input) const {
  const std::string text{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::istringstream rest(text);
    return ConfigBase::from_config(rest);
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<CLI::ConfigItem> items;
  for (const auto& [key, value] : doc.items()) {
    CLI::ConfigItem item;
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar_text(v, key));
    } else {
      item.inputs.push_back(scalar_text(value, key));
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace mallows::cli
