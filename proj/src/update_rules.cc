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

#include "phidec/update_rules.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace phidec {
namespace {

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool coin(Rng& rng) { return (rng() >> 63) != 0; }

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

// Moves the recorded anyon at `site` across `edge` to `target`.
void move_anyon(SimulationState& state, std::size_t site, std::size_t target,
                std::size_t edge) {
  apply_x(state.lattice, state.config, edge, &state.true_syndrome());
  state.recorded()[site] ^= 1;
  state.recorded()[target] ^= 1;
}

bool try_move(SimulationState& state, std::size_t site,
              std::span<const double> plane) {
  if (coin(state.rng)) return false;
  const auto neighbors = state.lattice.site_neighbors(site);
  std::array<double, 4> values;
  for (int k = 0; k < 4; ++k) values[k] = plane[neighbors[k]];
  const double hi = *std::max_element(values.begin(), values.end());
  const double lo = *std::min_element(values.begin(), values.end());
  const double tol = 1e-12 * std::max(1.0, std::abs(hi));
  if (hi - lo <= tol) return false;
  std::array<int, 4> best;
  int n_best = 0;
  for (int k = 0; k < 4; ++k) {
    if (hi - values[k] <= tol) best[n_best++] = k;
  }
  const int pick =
      n_best == 1 ? best[0] : best[static_cast<int>(state.rng() % n_best)];
  move_anyon(state, site, neighbors[pick],
             state.lattice.site_edges(site)[pick]);
  return true;
}

}  // namespace

void NoiseParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1], got " +
                                std::to_string(p));
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("q must lie in [0, 1], got " +
                                std::to_string(q));
  }
}

SimulationState::SimulationState(int L, int H, std::uint64_t seed)
    : lattice(L),
      config(lattice),
      syndromes(lattice),
      field(L, H),
      rng(seed) {}

std::uint64_t SimulationState::state_hash() const {
  std::uint64_t h = config.hash();
  for (std::uint8_t b : syndromes.true_syndrome) h = mix(h, b);
  for (std::uint8_t b : syndromes.recorded_syndrome) h = mix(h, b + 2);
  for (double v : field.values()) h = mix(h, std::bit_cast<std::uint64_t>(v));
  return mix(h, std::bit_cast<std::uint64_t>(clock));
}

void error_map(SimulationState& state, double p) {
  if (p <= 0.0) return;
  const std::size_t n = state.config.size();
  if (p >= 1.0) {
    for (std::size_t e = 0; e < n; ++e) {
      apply_x(state.lattice, state.config, e, &state.true_syndrome());
    }
    return;
  }
  // Skip ahead by geometric gaps between flipped edges.
  const double log_keep = std::log1p(-p);
  std::size_t e = 0;
  while (true) {
    const double u = 1.0 - uniform01(state.rng);  // (0, 1]
    const double gap = std::floor(std::log(u) / log_keep);
    if (gap >= static_cast<double>(n - e)) break;
    e += static_cast<std::size_t>(gap);
    apply_x(state.lattice, state.config, e, &state.true_syndrome());
    if (++e >= n) break;
  }
}

void measure(SimulationState& state, double q) {
  auto& rec = state.recorded();
  const auto& truth = state.true_syndrome();
  if (q <= 0.0) {
    rec = truth;
    return;
  }
  for (std::size_t s = 0; s < rec.size(); ++s) {
    rec[s] = truth[s] ^ (uniform01(state.rng) < q ? 1 : 0);
  }
}

void anyon_update(SimulationState& state, std::span<const double> plane) {
  std::vector<std::size_t> occupied;
  const auto& rec = state.recorded();
  for (std::size_t s = 0; s < rec.size(); ++s) {
    if (rec[s]) occupied.push_back(s);
  }
  std::shuffle(occupied.begin(), occupied.end(), state.rng);
  for (std::size_t s : occupied) {
    if (state.recorded()[s]) try_move(state, s, plane);
  }
}

void anyon_update(SimulationState& state) {
  anyon_update(state, state.field.plane());
}

bool local_anyon_update(SimulationState& state, std::size_t site,
                        std::span<const double> plane) {
  if (!state.recorded()[site]) return false;
  return try_move(state, site, plane);
}

void local_flip(SimulationState& state, std::size_t edge, double p) {
  if (p >= 1.0 || (p > 0.0 && uniform01(state.rng) < p)) {
    apply_x(state.lattice, state.config, edge, &state.true_syndrome());
  }
}

void local_measure(SimulationState& state, std::size_t site, double q) {
  std::uint8_t v = state.true_syndrome()[site];
  if (q >= 1.0 || (q > 0.0 && uniform01(state.rng) < q)) v ^= 1;
  state.recorded()[site] = v;
}

void compound_step(SimulationState& state, int c) {
  for (int i = 0; i < c; ++i) field_step(state.field, state.recorded());
  anyon_update(state);
}

}  // namespace phidec
