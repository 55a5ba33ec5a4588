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

#include "phidec/toric_code.h"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace phidec {

Lattice::Lattice(int L) : L_(L) {
  if (L < 2) {
    throw std::invalid_argument("lattice size L must be >= 2, got " +
                                std::to_string(L));
  }
}

std::pair<std::size_t, std::size_t> Lattice::edge_sites(
    std::size_t edge) const {
  const Site s = site_at(edge / 2);
  if (edge % 2 == 0) {
    return {site_index(s.x, s.y), site_index(s.x + 1, s.y)};
  }
  return {site_index(s.x, s.y), site_index(s.x, s.y + 1)};
}

std::array<std::size_t, 4> Lattice::site_neighbors(std::size_t site) const {
  const Site s = site_at(site);
  return {site_index(s.x + 1, s.y), site_index(s.x - 1, s.y),
          site_index(s.x, s.y + 1), site_index(s.x, s.y - 1)};
}

std::array<std::size_t, 4> Lattice::site_edges(std::size_t site) const {
  const Site s = site_at(site);
  return {edge_index(s.x, s.y, EdgeDir::kRight),
          edge_index(s.x - 1, s.y, EdgeDir::kRight),
          edge_index(s.x, s.y, EdgeDir::kDown),
          edge_index(s.x, s.y - 1, EdgeDir::kDown)};
}

std::array<std::size_t, 4> Lattice::stabilizer_edges(Site corner) const {
  const int x = corner.x;
  const int y = corner.y;
  return {edge_index(x, y, EdgeDir::kRight),
          edge_index(x, y + 1, EdgeDir::kRight),
          edge_index(x, y, EdgeDir::kDown),
          edge_index(x + 1, y, EdgeDir::kDown)};
}

std::size_t ErrorConfig::weight() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::uint64_t ErrorConfig::hash() const {
  // FNV-1a over the bit plane.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bits_) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SyndromePlane syndrome(const Lattice& lattice, const ErrorConfig& config) {
  SyndromePlane out(lattice.num_sites(), 0);
  for (std::size_t s = 0; s < lattice.num_sites(); ++s) {
    std::uint8_t parity = 0;
    for (std::size_t e : lattice.site_edges(s)) parity ^= config[e];
    out[s] = parity;
  }
  return out;
}

void apply_x(const Lattice& lattice, ErrorConfig& config, std::size_t edge,
             SyndromePlane* true_syndrome) {
  if (edge >= config.size()) {
    throw std::out_of_range("edge index " + std::to_string(edge) +
                            " out of range");
  }
  config.toggle(edge);
  if (true_syndrome != nullptr) {
    const auto [a, b] = lattice.edge_sites(edge);
    (*true_syndrome)[a] ^= 1;
    (*true_syndrome)[b] ^= 1;
  }
}

HomologyClass homology_class(const Lattice& lattice,
                             const ErrorConfig& config) {
  const SyndromePlane syn = syndrome(lattice, config);
  if (count_anyons(syn) != 0) {
    throw NotAnyonFree("homology_class requires an anyon-free configuration");
  }
  const int L = lattice.size();
  HomologyClass h;
  for (int y = 0; y < L; ++y) {
    h.h1 ^= config[lattice.edge_index(L - 1, y, EdgeDir::kRight)];
  }
  for (int x = 0; x < L; ++x) {
    h.h2 ^= config[lattice.edge_index(x, L - 1, EdgeDir::kDown)];
  }
  return h;
}

std::size_t count_anyons(const SyndromePlane& plane) {
  return static_cast<std::size_t>(std::count(plane.begin(), plane.end(), 1));
}

int torus_manhattan(Site a, Site b, int L) {
  const int dx = std::abs(a.x - b.x) % L;
  const int dy = std::abs(a.y - b.y) % L;
  return std::min(dx, L - dx) + std::min(dy, L - dy);
}

}  // namespace phidec
