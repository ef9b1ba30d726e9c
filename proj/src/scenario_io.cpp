#include "aoi/scenario_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace aoi {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + key, "missing required key");
  return *it;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw SchemaError(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(key, "expected a finite number");
  return x;
}

std::int64_t integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && std::floor(x) == x && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
  }
  throw SchemaError(key, "expected an integer");
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw SchemaError(path + key, "unknown key");
  }
}

ShiftedExp delay(const json& doc, const std::string& key) {
  const json& obj = require(doc, key, "");
  if (!obj.is_object()) throw SchemaError(key, "expected an object with rate and shift");
  reject_unknown(obj, {"rate", "shift"}, key + ".");
  const double rate = number(require(obj, "rate", key + "."), key + ".rate");
  const double shift = number(require(obj, "shift", key + "."), key + ".shift");
  if (!(rate > 0.0)) throw SchemaError(key + ".rate", "must be positive");
  if (!(shift >= 0.0)) throw SchemaError(key + ".shift", "must be nonnegative");
  return ShiftedExp(rate, shift);
}

}  // namespace

Scenario ScenarioFile::scenario() const {
  if (!k1) throw SchemaError("k1", "missing required key");
  if (!k2) throw SchemaError("k2", "missing required key");
  return tmpl.with_thresholds(*k1, *k2);
}

ScenarioFile parse_scenario(const json& doc) {
  if (!doc.is_object()) throw SchemaError("<root>", "expected a JSON object");
  reject_unknown(doc, {"n", "k1", "k2", "delay_I", "delay_II", "p1", "mode", "mu"}, "");

  ScenarioFile f;
  f.tmpl.n = integer(require(doc, "n", ""), "n");
  if (f.tmpl.n < 1) throw SchemaError("n", "must be >= 1");
  for (const char* key : {"k1", "k2"}) {
    if (!doc.contains(key)) continue;
    const std::int64_t k = integer(doc.at(key), key);
    if (k < 1 || k > f.tmpl.n) throw SchemaError(key, "must lie in [1, n]");
    (std::string(key) == "k1" ? f.k1 : f.k2) = k;
  }
  f.tmpl.delay_I = delay(doc, "delay_I");
  f.tmpl.delay_II = delay(doc, "delay_II");
  const double p1 = number(require(doc, "p1", ""), "p1");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw SchemaError("p1", "must lie in [0, 1]");
  f.tmpl.mix = StreamMix(p1);

  const json& mode = require(doc, "mode", "");
  if (!mode.is_string()) throw SchemaError("mode", "expected \"at_will\" or \"exogenous\"");
  const auto m = mode.get<std::string>();
  if (m == "at_will") {
    if (doc.contains("mu")) throw SchemaError("mu", "only allowed when mode is \"exogenous\"");
    f.tmpl.mode = Generation::at_will();
  } else if (m == "exogenous") {
    const double mu = number(require(doc, "mu", ""), "mu");
    if (!(mu > 0.0)) throw SchemaError("mu", "must be positive");
    f.tmpl.mode = Generation::exogenous(mu);
  } else {
    throw SchemaError("mode", "expected \"at_will\" or \"exogenous\", got \"" + m + "\"");
  }
  return f;
}

ScenarioFile load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("<file>", "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw SchemaError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const ScenarioFile& f) {
  const auto delay = [](const ShiftedExp& d) { return json{{"rate", d.rate()}, {"shift", d.shift()}}; };
  json doc{{"n", f.tmpl.n},
           {"delay_I", delay(f.tmpl.delay_I)},
           {"delay_II", delay(f.tmpl.delay_II)},
           {"p1", f.tmpl.mix.p1()},
           {"mode", f.tmpl.mode.is_exogenous() ? "exogenous" : "at_will"}};
  if (f.k1) doc["k1"] = *f.k1;
  if (f.k2) doc["k2"] = *f.k2;
  if (f.tmpl.mode.is_exogenous()) doc["mu"] = f.tmpl.mode.mu();
  return doc;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_age(const Age& a) { return a.is_finite() ? format_double(a.value()) : "infinite"; }

json age_json(const Age& a) { return a.is_finite() ? json(a.value()) : json("infinite"); }

}  // namespace aoi
