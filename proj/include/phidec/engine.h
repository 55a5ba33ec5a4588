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

#ifndef PHIDEC_ENGINE_H_
#define PHIDEC_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phidec/toric_code.h"
#include "phidec/update_rules.h"

namespace phidec {

enum class Mode { kStatic, kSynchronous, kAsynchronous, kExplicit, kToom };

std::string_view mode_name(Mode mode);
// Accepts "static", "sync", "async", "explicit", "toom".
Mode parse_mode(std::string_view name);

// Event rates of the asynchronous engine, per edge (X) or per site (m, a)
// or per automaton cell (f) and unit time. The field rate is c(L) times
// gamma_base.
struct RateSet {
  double gamma_x = 1.0;
  double gamma_m = 1.0;
  double gamma_a = 1.0;
  double gamma_base = 1.0;

  double gamma_f(int c) const { return c * gamma_base; }
  void validate() const;

  bool operator==(const RateSet&) const = default;
};

// How the decoder obtains the in-plane field.
struct FieldModel {
  enum class Kind { kAutomaton, kExplicit };
  Kind kind = Kind::kAutomaton;
  double alpha = 1.05;  // only for kExplicit

  static FieldModel automaton() { return {}; }
  static FieldModel explicit_power(double alpha) {
    return {Kind::kExplicit, alpha};
  }
};

struct DecoderParams {
  int L = 12;
  int height = 0;       // 0 selects default_field_height(L)
  double kappa = 1.0;   // c(L) = ceil(kappa * log2(L)^2)
  int k_ver = 16;       // verification cutoff is k_ver * L rounds
  int verify_stride = 1;
  bool exponential_waiting = false;
  RateSet rates;
  FieldModel field;

  int field_height() const;
  int c() const;
  void validate() const;
};

struct SurvivalRecord {
  Mode mode = Mode::kSynchronous;
  int L = 0;
  double p = 0.0;
  double q = 0.0;
  double alpha = 0.0;  // explicit mode only
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  double failure_time = 0.0;
  bool censored = false;
  bool success = false;  // static mode only
  double wall_time = 0.0;

  bool operator==(const SurvivalRecord&) const = default;
};

// Decodes a copy of `config` with perfect syndromes starting from a fresh
// field for at most k_ver * L rounds. Returns true on a logical failure:
// anyons left at the cutoff or a nontrivial homology class.
bool verify_logical(const ErrorConfig& config, const DecoderParams& params,
                    std::uint64_t seed);

// verify_logical with a one-entry memo. The verification stream is seeded
// from (seed, config hash), so the result is a pure function of the config.
class Verifier {
 public:
  Verifier(const DecoderParams& params, std::uint64_t seed)
      : params_(params), seed_(seed) {}

  bool failed(const ErrorConfig& config, const SyndromePlane& true_syndrome);
  std::size_t calls() const { return calls_; }
  std::size_t decodes() const { return decodes_; }

 private:
  DecoderParams params_;
  std::uint64_t seed_;
  std::optional<ErrorConfig> last_config_;
  bool last_result_ = false;
  std::size_t calls_ = 0;
  std::size_t decodes_ = 0;
};

// One decoding round with the configured field model: c automaton sweeps
// or a freshly computed explicit field, followed by an anyon pass.
void decode_round(SimulationState& state, const DecoderParams& params, int c);

struct StaticResult {
  bool success = false;
  bool timeout = false;
  int rounds = 0;
  HomologyClass residual;
};

// Up to tau_max decoding rounds on `state` as it stands, stopping once
// anyon-free.
StaticResult decode_static(SimulationState& state, const DecoderParams& params,
                           int tau_max);

// One noise application, one perfect measurement, then up to tau_max
// decoding rounds (stopping once anyon-free).
StaticResult run_static(const DecoderParams& params, double p, int tau_max,
                        std::uint64_t seed);

// Sequences of noise, faulty measurement and one decoding round; verified
// every verify_stride sequences. Censored at `cap` sequences.
SurvivalRecord run_synchronous(const DecoderParams& params, double p, double q,
                               double cap, std::uint64_t seed);

// As run_synchronous with the explicit 1/r^alpha field.
SurvivalRecord run_explicit(const DecoderParams& params, double p, double q,
                            double cap, std::uint64_t seed);

struct EventCounts {
  std::uint64_t flip = 0;
  std::uint64_t measure = 0;
  std::uint64_t anyon = 0;
  std::uint64_t field = 0;
};

// Random local events at rates proportional to
// (gamma_x 2L^2, gamma_m L^2, gamma_a L^2, gamma_f L^2 H). One unit of time
// is the expected interval over which every plaquette is selected for an
// anyon update gamma_a times.
SurvivalRecord run_asynchronous(const DecoderParams& params, double p,
                                double q, double cap, std::uint64_t seed,
                                EventCounts* counts = nullptr);

// Draws the event category for the asynchronous engine; exposed for tests.
class EventSampler {
 public:
  enum class Category { kFlip, kMeasure, kAnyon, kField };
  struct Event {
    Category category;
    std::size_t index;
  };

  EventSampler(const DecoderParams& params);
  Event draw(Rng& rng) const;
  double total_rate() const { return total_; }
  double weight(Category c) const;

 private:
  std::size_t n_edges_;
  std::size_t n_sites_;
  std::size_t n_cells_;
  double gamma_x_, gamma_m_, gamma_a_, gamma_f_;
  double cut_m_, cut_a_, cut_f_;
  double total_;
};

// Expected lifetime of an unprotected qubit: 1 / p steps.
double bare_qubit_baseline(double p);

// A (mode, L, p, q, alpha) cell of a Monte Carlo sweep.
struct CellSpec {
  Mode mode = Mode::kSynchronous;
  DecoderParams params;
  double p = 0.0;
  double q = 0.0;
  double cap = 1e7;
};

std::uint64_t derive_seed(std::uint64_t master, const CellSpec& cell,
                          std::uint64_t trial);

SurvivalRecord run_trial(const CellSpec& cell, std::uint64_t trial,
                         std::uint64_t master_seed);

// Throws std::invalid_argument for an unusable cell.
void validate_cell(const CellSpec& cell);

// Runs trials [0, n) not listed in `done` on `workers` threads. `on_record`
// is called under a lock as each trial completes. The result holds the new
// records ordered by trial index. The first error raised by a worker is
// rethrown here.
std::vector<SurvivalRecord> run_trials(
    const CellSpec& cell, std::size_t n, std::uint64_t master_seed,
    int workers, const std::vector<std::uint64_t>& done = {},
    const std::function<void(const SurvivalRecord&)>& on_record = {});

}  // namespace phidec

#endif  // PHIDEC_ENGINE_H_
