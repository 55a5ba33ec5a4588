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

#include "phidec/toom.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "phidec/update_rules.h"

namespace phidec {

BinaryGrid::BinaryGrid(int L, bool fill)
    : L_(L), bits_(static_cast<std::size_t>(L) * L, fill ? 1 : 0) {
  if (L < 2) throw std::invalid_argument("grid size must be >= 2");
}

std::size_t BinaryGrid::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

BinaryGrid nec_step(const BinaryGrid& grid) {
  const int L = grid.size();
  BinaryGrid out(L);
  for (int y = 0; y < L; ++y) {
    const int north = y == 0 ? L - 1 : y - 1;
    for (int x = 0; x < L; ++x) {
      const int east = x + 1 == L ? 0 : x + 1;
      const int votes = grid.at(x, north) + grid.at(east, y) + grid.at(x, y);
      out.set(x, y, votes >= 2);
    }
  }
  return out;
}

SurvivalRecord toom_survival(int L, double noise_p, double cap,
                             std::uint64_t seed) {
  if (!(noise_p >= 0.0 && noise_p < 0.5)) {
    throw std::invalid_argument("toom noise_p must lie in [0, 0.5), got " +
                                std::to_string(noise_p));
  }
  const auto start = std::chrono::steady_clock::now();
  Rng rng(seed);
  BinaryGrid grid(L);
  const std::size_t n = grid.num_cells();
  SurvivalRecord rec;
  rec.mode = Mode::kToom;
  rec.L = L;
  rec.p = noise_p;
  rec.seed = seed;
  rec.censored = true;
  rec.failure_time = cap;
  const double log_keep = noise_p > 0.0 ? std::log1p(-noise_p) : 0.0;
  const auto steps = static_cast<std::uint64_t>(cap);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    if (noise_p > 0.0) {
      std::size_t i = 0;
      while (true) {
        const double u =
            1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;  // (0, 1]
        const double gap = std::floor(std::log(u) / log_keep);
        if (gap >= static_cast<double>(n - i)) break;
        i += static_cast<std::size_t>(gap);
        grid.toggle(i);
        if (++i >= n) break;
      }
    }
    grid = nec_step(grid);
    if (2 * grid.count_ones() > n) {
      rec.censored = false;
      rec.failure_time = static_cast<double>(t);
      break;
    }
  }
  rec.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return rec;
}

}  // namespace phidec
