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

#ifndef PHIDEC_CONFIG_H_
#define PHIDEC_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "phidec/engine.h"

namespace phidec {

// Invalid or missing configuration value; key() names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument("config key '" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  Mode mode = Mode::kSynchronous;
  std::vector<int> L;
  std::vector<double> p;
  bool q_equals_p = true;   // "q": "p"
  double q = 0.0;           // used when !q_equals_p
  double kappa = 1.0;
  int height = 0;           // 0 = max(4, L / 2)
  std::vector<double> alpha = {1.05};
  RateSet rates;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double cap = 1e7;
  int verify_stride = 1;
  int k_ver = 16;
  bool exponential_waiting = false;
  int workers = 1;
  std::string output;

  double q_for(double p_value) const { return q_equals_p ? p_value : q; }
  std::vector<CellSpec> cells() const;
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

// Required keys: mode, L, p, samples, seed. Everything else is defaulted.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

RunConfig load_config(const std::string& path);

// Header echoed before a run: the full config plus c(L) and H per size.
nlohmann::json run_header(const RunConfig& config);

}  // namespace phidec

#endif  // PHIDEC_CONFIG_H_
