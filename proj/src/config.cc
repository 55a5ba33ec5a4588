// Copyright 2026 The phidecoder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phidec/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "phidec/phi_field.h"

namespace phidec {
namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mode",        "L",       "p",       "q",      "kappa",
      "H",           "alpha",   "rates",   "samples", "seed",
      "cap",         "verify_stride", "k_ver", "exponential_waiting",
      "workers",     "output"};
  return keys;
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("wrong type: ") + e.what());
  }
}

// Scalars are accepted where a list is expected.
template <typename T>
std::vector<T> get_list(const json& j, const std::string& key) {
  const json& v = j.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("wrong type: ") + e.what());
  }
}

}  // namespace

std::vector<CellSpec> RunConfig::cells() const {
  std::vector<CellSpec> out;
  const std::vector<double> alphas =
      mode == Mode::kExplicit ? alpha : std::vector<double>{0.0};
  for (double a : alphas) {
    for (int size : L) {
      for (double pv : p) {
        CellSpec cell;
        cell.mode = mode;
        cell.params.L = size;
        cell.params.height = height;
        cell.params.kappa = kappa;
        cell.params.k_ver = k_ver;
        cell.params.verify_stride = verify_stride;
        cell.params.exponential_waiting = exponential_waiting;
        cell.params.rates = rates;
        if (mode == Mode::kExplicit) {
          cell.params.field = FieldModel::explicit_power(a);
        }
        cell.p = pv;
        cell.q = mode == Mode::kStatic || mode == Mode::kToom ? 0.0 : q_for(pv);
        cell.cap = cap;
        out.push_back(cell);
      }
    }
  }
  return out;
}

void RunConfig::validate() const {
  if (L.empty()) throw ConfigError("L", "list must not be empty");
  for (int v : L) {
    if (v < 2) throw ConfigError("L", "sizes must be >= 2");
  }
  if (p.empty()) throw ConfigError("p", "list must not be empty");
  for (double v : p) {
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError("p", "must lie in [0, 1)");
    if (mode == Mode::kToom && !(v < 0.5)) {
      throw ConfigError("p", "toom noise must lie in [0, 0.5)");
    }
  }
  if (!q_equals_p && !(q >= 0.0 && q < 1.0)) {
    throw ConfigError("q", "must be \"p\" or lie in [0, 1)");
  }
  if (!(kappa > 0.0)) throw ConfigError("kappa", "must be > 0");
  if (height < 0) throw ConfigError("H", "must be >= 0 (0 = default)");
  if (alpha.empty()) throw ConfigError("alpha", "list must not be empty");
  for (double a : alpha) {
    if (!(a > 0.0)) throw ConfigError("alpha", "must be > 0");
  }
  if (!(rates.gamma_x > 0 && rates.gamma_m > 0 && rates.gamma_a > 0 &&
        rates.gamma_base > 0)) {
    throw ConfigError("rates", "all rates must be > 0");
  }
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  if (!(cap >= 1.0)) throw ConfigError("cap", "must be >= 1");
  if (verify_stride < 1) throw ConfigError("verify_stride", "must be >= 1");
  if (k_ver < 1) throw ConfigError("k_ver", "must be >= 1");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
  }
  for (const char* key : {"mode", "L", "p", "samples", "seed"}) {
    if (!j.contains(key)) throw ConfigError(key, "missing required key");
  }
  RunConfig c;
  try {
    c.mode = parse_mode(get_as<std::string>(j, "mode"));
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("mode", e.what());
  }
  c.L = get_list<int>(j, "L");
  c.p = get_list<double>(j, "p");
  if (j.contains("q")) {
    const json& q = j.at("q");
    if (q.is_string()) {
      if (q.get<std::string>() != "p") {
        throw ConfigError("q", "string value must be \"p\"");
      }
      c.q_equals_p = true;
    } else if (q.is_number()) {
      c.q_equals_p = false;
      c.q = q.get<double>();
    } else {
      throw ConfigError("q", "must be \"p\" or a number");
    }
  }
  if (j.contains("kappa")) c.kappa = get_as<double>(j, "kappa");
  if (j.contains("H")) c.height = get_as<int>(j, "H");
  if (j.contains("alpha")) c.alpha = get_list<double>(j, "alpha");
  if (j.contains("rates")) {
    const json& r = j.at("rates");
    if (!r.is_object()) throw ConfigError("rates", "must be an object");
    for (const auto& [key, value] : r.items()) {
      if (key != "gamma_x" && key != "gamma_m" && key != "gamma_a" &&
          key != "gamma_base") {
        throw ConfigError("rates." + key, "unknown rate");
      }
    }
    if (r.contains("gamma_x")) c.rates.gamma_x = get_as<double>(r, "gamma_x");
    if (r.contains("gamma_m")) c.rates.gamma_m = get_as<double>(r, "gamma_m");
    if (r.contains("gamma_a")) c.rates.gamma_a = get_as<double>(r, "gamma_a");
    if (r.contains("gamma_base")) {
      c.rates.gamma_base = get_as<double>(r, "gamma_base");
    }
  }
  const json& samples = j.at("samples");
  if (!samples.is_number_integer() || samples.get<long long>() < 1) {
    throw ConfigError("samples", "must be a positive integer");
  }
  c.samples = samples.get<std::size_t>();
  if (!j.at("seed").is_number_integer()) {
    throw ConfigError("seed", "must be a non-negative integer");
  }
  c.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("cap")) c.cap = get_as<double>(j, "cap");
  if (j.contains("verify_stride")) {
    c.verify_stride = get_as<int>(j, "verify_stride");
  }
  if (j.contains("k_ver")) c.k_ver = get_as<int>(j, "k_ver");
  if (j.contains("exponential_waiting")) {
    c.exponential_waiting = get_as<bool>(j, "exponential_waiting");
  }
  if (j.contains("workers")) c.workers = get_as<int>(j, "workers");
  if (j.contains("output")) c.output = get_as<std::string>(j, "output");
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["mode"] = std::string(mode_name(c.mode));
  j["L"] = c.L;
  j["p"] = c.p;
  if (c.q_equals_p) {
    j["q"] = "p";
  } else {
    j["q"] = c.q;
  }
  j["kappa"] = c.kappa;
  j["H"] = c.height;
  j["alpha"] = c.alpha;
  j["rates"] = {{"gamma_x", c.rates.gamma_x},
                {"gamma_m", c.rates.gamma_m},
                {"gamma_a", c.rates.gamma_a},
                {"gamma_base", c.rates.gamma_base}};
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["cap"] = c.cap;
  j["verify_stride"] = c.verify_stride;
  j["k_ver"] = c.k_ver;
  j["exponential_waiting"] = c.exponential_waiting;
  j["workers"] = c.workers;
  j["output"] = c.output;
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

json run_header(const RunConfig& config) {
  json h;
  h["type"] = "header";
  h["config"] = config_to_json(config);
  json sizes = json::array();
  for (int size : config.L) {
    DecoderParams params;
    params.L = size;
    params.height = config.height;
    params.kappa = config.kappa;
    sizes.push_back(
        {{"L", size}, {"c", params.c()}, {"H", params.field_height()}});
  }
  h["sizes"] = sizes;
  return h;
}

}  // namespace phidec
