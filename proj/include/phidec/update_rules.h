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

#ifndef PHIDEC_UPDATE_RULES_H_
#define PHIDEC_UPDATE_RULES_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "phidec/phi_field.h"
#include "phidec/toric_code.h"

namespace phidec {

using Rng = std::mt19937_64;

struct NoiseParams {
  double p = 0.0;  // X flip probability per qubit per application
  double q = 0.0;  // syndrome readout error probability

  // Throws std::invalid_argument unless both lie in [0, 1].
  void validate() const;
};

// Everything one decoding trajectory owns. true_syndrome is maintained
// incrementally and always equals syndrome(lattice, config).
struct SimulationState {
  Lattice lattice;
  ErrorConfig config;
  SyndromeRecord syndromes;
  PhiField field;
  Rng rng;
  double clock = 0.0;

  SimulationState(int L, int H, std::uint64_t seed);

  SyndromePlane& true_syndrome() { return syndromes.true_syndrome; }
  SyndromePlane& recorded() { return syndromes.recorded_syndrome; }
  const SyndromePlane& true_syndrome() const {
    return syndromes.true_syndrome;
  }
  const SyndromePlane& recorded() const { return syndromes.recorded_syndrome; }

  // Hash over config, syndromes and field values (not the rng).
  std::uint64_t state_hash() const;
};

// Toggles every edge independently with probability p.
void error_map(SimulationState& state, double p);

// recorded := true XOR Bernoulli(q), independently per plaquette.
void measure(SimulationState& state, double q);

// One anyon-move pass against a frozen in-plane field. Occupied sites are
// snapshotted and visited in random order; each still-occupied site moves
// with probability 1/2 towards its highest neighbor (ties at random), unless
// all four neighbors hold the same value.
void anyon_update(SimulationState& state, std::span<const double> plane);
void anyon_update(SimulationState& state);

// The per-site form of anyon_update. No-op on an unrecorded site. Returns
// true if the anyon moved.
bool local_anyon_update(SimulationState& state, std::size_t site,
                        std::span<const double> plane);

// Single-edge Bernoulli(p) flip and single-site faulty refresh.
void local_flip(SimulationState& state, std::size_t edge, double p);
void local_measure(SimulationState& state, std::size_t site, double q);

// c synchronous field sweeps on the recorded syndrome, then one anyon pass.
void compound_step(SimulationState& state, int c);

}  // namespace phidec

#endif  // PHIDEC_UPDATE_RULES_H_
