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

#include "phidec/phi_field.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace phidec {

int default_field_height(int L) { return std::max(4, L / 2); }

int field_updates_per_round(int L, double kappa) {
  const double lg = std::log2(static_cast<double>(L));
  return std::max(1, static_cast<int>(std::ceil(kappa * lg * lg - 1e-9)));
}

PhiField::PhiField(int L, int H)
    : L_(L),
      H_(H),
      values_(static_cast<std::size_t>(L) * L * H, 0.0),
      scratch_(values_.size(), 0.0) {
  if (L < 2 || H < 1) {
    throw std::invalid_argument("field needs L >= 2 and H >= 1, got L=" +
                                std::to_string(L) + " H=" + std::to_string(H));
  }
}

void PhiField::clear() { std::fill(values_.begin(), values_.end(), 0.0); }

double PhiField::neighbor_mean(std::span<const double> src,
                               std::size_t cell) const {
  const std::size_t plane = plane_size();
  const std::size_t z = cell / plane;
  const std::size_t rem = cell % plane;
  const std::size_t y = rem / L_;
  const std::size_t x = rem % L_;
  const std::size_t row = cell - x;
  const std::size_t layer = cell - rem;
  const std::size_t xp = x + 1 == static_cast<std::size_t>(L_) ? 0 : x + 1;
  const std::size_t xm = x == 0 ? L_ - 1 : x - 1;
  const std::size_t yp = y + 1 == static_cast<std::size_t>(L_) ? 0 : y + 1;
  const std::size_t ym = y == 0 ? L_ - 1 : y - 1;
  double sum = src[row + xp] + src[row + xm] + src[layer + yp * L_ + x] +
               src[layer + ym * L_ + x];
  sum += z == 0 ? src[cell] : src[cell - plane];
  if (z + 1 < static_cast<std::size_t>(H_)) sum += src[cell + plane];
  return sum / 6.0;
}

void field_step(PhiField& field, const SyndromePlane& sources) {
  const std::size_t L = field.L_;
  const std::size_t plane = field.plane_size();
  const std::size_t H = field.H_;
  const double* src = field.values_.data();
  double* dst = field.scratch_.data();
  constexpr double kSixth = 1.0 / 6.0;
  for (std::size_t z = 0; z < H; ++z) {
    const double* below = z == 0 ? src : src + (z - 1) * plane;
    const double* above = z + 1 < H ? src + (z + 1) * plane : nullptr;
    for (std::size_t y = 0; y < L; ++y) {
      const std::size_t ym = y == 0 ? L - 1 : y - 1;
      const std::size_t yp = y + 1 == L ? 0 : y + 1;
      const double* mid = src + z * plane;
      const double* row = mid + y * L;
      const double* row_m = mid + ym * L;
      const double* row_p = mid + yp * L;
      const double* row_below = below + y * L;
      const double* row_above = above != nullptr ? above + y * L : nullptr;
      double* out = dst + z * plane + y * L;
      // Interior columns first (no wrap, vectorizable), then the two edges.
      if (row_above != nullptr) {
        for (std::size_t x = 1; x + 1 < L; ++x) {
          out[x] = (row[x - 1] + row[x + 1] + row_m[x] + row_p[x] +
                    row_below[x] + row_above[x]) *
                   kSixth;
        }
      } else {
        for (std::size_t x = 1; x + 1 < L; ++x) {
          out[x] = (row[x - 1] + row[x + 1] + row_m[x] + row_p[x] +
                    row_below[x]) *
                   kSixth;
        }
      }
      for (std::size_t x : {std::size_t{0}, L - 1}) {
        const std::size_t xm = x == 0 ? L - 1 : x - 1;
        const std::size_t xp = x + 1 == L ? 0 : x + 1;
        double sum = row[xm] + row[xp] + row_m[x] + row_p[x] + row_below[x];
        if (row_above != nullptr) sum += row_above[x];
        out[x] = sum * kSixth;
      }
    }
  }
  for (std::size_t s = 0; s < plane; ++s) {
    if (sources[s]) dst[s] += 1.0;
  }
  field.values_.swap(field.scratch_);
}

void local_field_update(PhiField& field, std::size_t cell,
                        const SyndromePlane& sources) {
  double v = field.neighbor_mean(field.values(), cell);
  if (cell < field.plane_size() && sources[cell]) v += 1.0;
  field.mutable_values()[cell] = v;
}

std::vector<double> explicit_field(const Lattice& lattice,
                                   const SyndromePlane& anyons, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("explicit field exponent alpha must be > 0");
  }
  const int L = lattice.size();
  // Manhattan distances on the torus never exceed L.
  std::vector<double> kernel(static_cast<std::size_t>(L) + 1);
  for (int d = 0; d <= L; ++d) {
    kernel[d] = 1.0 / std::pow(static_cast<double>(std::max(d, 1)), alpha);
  }
  std::vector<Site> sources;
  for (std::size_t s = 0; s < anyons.size(); ++s) {
    if (anyons[s]) sources.push_back(lattice.site_at(s));
  }
  std::vector<double> out(lattice.num_sites(), 0.0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    const Site here = lattice.site_at(s);
    double sum = 0.0;
    for (const Site& a : sources) sum += kernel[torus_manhattan(here, a, L)];
    out[s] = sum;
  }
  return out;
}

void write_field_snapshot(std::ostream& out, const PhiField& field) {
  out << "# L=" << field.size() << " H=" << field.height() << "\n";
  out.precision(17);
  for (int z = 0; z < field.height(); ++z) {
    for (int y = 0; y < field.size(); ++y) {
      for (int x = 0; x < field.size(); ++x) {
        out << x << ' ' << y << ' ' << z << ' ' << field.at(x, y, z) << '\n';
      }
    }
  }
}

}  // namespace phidec
