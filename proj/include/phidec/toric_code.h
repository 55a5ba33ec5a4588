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

#ifndef PHIDEC_TORIC_CODE_H_
#define PHIDEC_TORIC_CODE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace phidec {

// A plaquette site on the L x L torus.
struct Site {
  int x = 0;
  int y = 0;
  bool operator==(const Site&) const = default;
};

enum class EdgeDir : int { kRight = 0, kDown = 1 };

// Thrown when homology is requested for a configuration that still has anyons.
class NotAnyonFree : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry of the periodic L x L toric code, indexed on the plaquette
// (dual) lattice. Edge (x, y, kRight) joins plaquette (x, y) to (x+1, y);
// edge (x, y, kDown) joins (x, y) to (x, y+1). Edge index = 2 * site + dir.
class Lattice {
 public:
  explicit Lattice(int L);

  int size() const { return L_; }
  std::size_t num_sites() const { return static_cast<std::size_t>(L_) * L_; }
  std::size_t num_edges() const { return 2 * num_sites(); }

  int wrap(int v) const {
    v %= L_;
    return v < 0 ? v + L_ : v;
  }
  std::size_t site_index(int x, int y) const {
    return static_cast<std::size_t>(wrap(y)) * L_ + wrap(x);
  }
  std::size_t site_index(Site s) const { return site_index(s.x, s.y); }
  Site site_at(std::size_t index) const {
    return {static_cast<int>(index % L_), static_cast<int>(index / L_)};
  }
  std::size_t edge_index(int x, int y, EdgeDir dir) const {
    return 2 * site_index(x, y) + static_cast<std::size_t>(dir);
  }

  // The two plaquettes joined by an edge.
  std::pair<std::size_t, std::size_t> edge_sites(std::size_t edge) const;
  // Neighbor plaquettes in the order +x, -x, +y, -y. site_edges()[k] is
  // the edge joining `site` to site_neighbors()[k].
  std::array<std::size_t, 4> site_neighbors(std::size_t site) const;
  std::array<std::size_t, 4> site_edges(std::size_t site) const;

  // The four edges around the lattice vertex shared by plaquettes
  // (x, y), (x+1, y), (x, y+1), (x+1, y+1). Toggling them is a stabilizer:
  // every touched plaquette flips twice.
  std::array<std::size_t, 4> stabilizer_edges(Site corner) const;

 private:
  int L_;
};

// Cumulative X errors (errors and corrections share one bit plane).
class ErrorConfig {
 public:
  explicit ErrorConfig(const Lattice& lattice)
      : bits_(lattice.num_edges(), 0) {}

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t edge) const { return bits_[edge] != 0; }
  void toggle(std::size_t edge) { bits_[edge] ^= 1; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t weight() const;
  std::uint64_t hash() const;

  bool operator==(const ErrorConfig&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

using SyndromePlane = std::vector<std::uint8_t>;

// True and recorded (decoder-held, possibly stale or faulty) syndromes.
struct SyndromeRecord {
  SyndromePlane true_syndrome;
  SyndromePlane recorded_syndrome;

  explicit SyndromeRecord(const Lattice& lattice)
      : true_syndrome(lattice.num_sites(), 0),
        recorded_syndrome(lattice.num_sites(), 0) {}
};

// Parity of the four incident edges of every plaquette.
SyndromePlane syndrome(const Lattice& lattice, const ErrorConfig& config);

// Toggles one edge. If `true_syndrome` is given, its two endpoints are
// toggled as well. Throws std::out_of_range for an invalid edge.
void apply_x(const Lattice& lattice, ErrorConfig& config, std::size_t edge,
             SyndromePlane* true_syndrome = nullptr);

struct HomologyClass {
  bool h1 = false;  // winding in x (crosses the x = L-1 | 0 cut)
  bool h2 = false;  // winding in y (crosses the y = L-1 | 0 cut)
  bool trivial() const { return !h1 && !h2; }
  bool operator==(const HomologyClass&) const = default;
};

// Homology class of an anyon-free configuration. Throws NotAnyonFree
// otherwise.
HomologyClass homology_class(const Lattice& lattice, const ErrorConfig& config);

std::size_t count_anyons(const SyndromePlane& plane);

int torus_manhattan(Site a, Site b, int L);

}  // namespace phidec

#endif  // PHIDEC_TORIC_CODE_H_
