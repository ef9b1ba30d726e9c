#pragma once

// Scenario JSON files and plain-text number formatting.
//
// {
//   "n": 10, "k1": 3, "k2": 5,
//   "delay_I":  {"rate": 1.0, "shift": 1.0},
//   "delay_II": {"rate": 2.0, "shift": 0.5},
//   "p1": 0.6,
//   "mode": "at_will" | "exogenous",
//   "mu": 2.0                      // required iff mode == "exogenous"
// }
//
// k1/k2 may be omitted in template files (pareto, sweep, approx eval).

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "aoi/optimizer.hpp"

namespace aoi {

/// Schema violation; key() names the offending key.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ScenarioFile {
  ScenarioTemplate tmpl;
  std::optional<std::int64_t> k1;
  std::optional<std::int64_t> k2;

  /// Throws SchemaError naming k1/k2 when they are absent or out of range.
  Scenario scenario() const;
};

ScenarioFile parse_scenario(const nlohmann::json& doc);
ScenarioFile load_scenario_file(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioFile& f);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double v);
/// "infinite" for a starved stream.
std::string format_age(const Age& a);
nlohmann::json age_json(const Age& a);

}  // namespace aoi
