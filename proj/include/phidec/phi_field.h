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

#ifndef PHIDEC_PHI_FIELD_H_
#define PHIDEC_PHI_FIELD_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "phidec/toric_code.h"

namespace phidec {

// Default height of the third field dimension: max(4, L / 2).
int default_field_height(int L);

// Field sweeps per anyon update, c(L) = ceil(kappa * (log2 L)^2), at least 1.
int field_updates_per_round(int L, double kappa = 1.0);

// Scalar field on the L x L x H automaton lattice. Periodic in x and y;
// mirror boundary below z = 0 and an absorbing zero boundary above
// z = H - 1. Anyon sources live in the z = 0 layer, which is stored first,
// so plane() is the in-plane field the anyons see.
//
// Cell index = (z * L + y) * L + x.
class PhiField {
 public:
  PhiField(int L, int H);

  int size() const { return L_; }
  int height() const { return H_; }
  std::size_t num_cells() const { return values_.size(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(L_) * L_;
  }
  std::size_t cell_index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * L_ + y) * L_ + x;
  }

  double at(int x, int y, int z) const { return values_[cell_index(x, y, z)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  std::span<const double> plane() const {
    return std::span<const double>(values_).first(plane_size());
  }

  void clear();

  // Mean of the six neighbors of a cell, read from `src`.
  double neighbor_mean(std::span<const double> src, std::size_t cell) const;

  // Synchronous sweep over all cells; sources are added after averaging.
  friend void field_step(PhiField& field, const SyndromePlane& sources);

 private:
  int L_;
  int H_;
  std::vector<double> values_;
  std::vector<double> scratch_;
};

void field_step(PhiField& field, const SyndromePlane& sources);

// In-place update of a single cell: neighbor mean plus the source term if
// the cell sits on a recorded anyon.
void local_field_update(PhiField& field, std::size_t cell,
                        const SyndromePlane& sources);

// Steady-state in-plane field sum_a 1 / max(d(x, a), 1)^alpha, with d the
// torus Manhattan distance. The r = 0 self-term counts as 1.
std::vector<double> explicit_field(const Lattice& lattice,
                                   const SyndromePlane& anyons, double alpha);

// One "x y z value" line per cell, preceded by a "# L H" header.
void write_field_snapshot(std::ostream& out, const PhiField& field);

}  // namespace phidec

#endif  // PHIDEC_PHI_FIELD_H_
