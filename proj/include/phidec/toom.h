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

#ifndef PHIDEC_TOOM_H_
#define PHIDEC_TOOM_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "phidec/engine.h"

namespace phidec {

// Bits on an L x L torus, row-major. North of (x, y) is (x, y - 1); east is
// (x + 1, y).
class BinaryGrid {
 public:
  explicit BinaryGrid(int L, bool fill = false);

  int size() const { return L_; }
  std::size_t num_cells() const { return bits_.size(); }
  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v) { bits_[index(x, y)] = v ? 1 : 0; }
  void toggle(std::size_t i) { bits_[i] ^= 1; }
  std::size_t count_ones() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  bool operator==(const BinaryGrid&) const = default;

 private:
  std::size_t index(int x, int y) const {
    const int xx = ((x % L_) + L_) % L_;
    const int yy = ((y % L_) + L_) % L_;
    return static_cast<std::size_t>(yy) * L_ + xx;
  }

  int L_;
  std::vector<std::uint8_t> bits_;
};

// Synchronous North-East-Center majority update.
BinaryGrid nec_step(const BinaryGrid& grid);

// Starts from all zeros and repeats (i.i.d. flips with probability noise_p,
// then nec_step) until ones hold a strict majority. failure_time counts
// steps; censored at `cap`.
SurvivalRecord toom_survival(int L, double noise_p, double cap,
                             std::uint64_t seed);

}  // namespace phidec

#endif  // PHIDEC_TOOM_H_
