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

#include <gtest/gtest.h>

#include "oracles.h"
#include "phidec/toric_code.h"

namespace phidec {
namespace {

TEST(HomologyOracleTest, AgreesWithCosetEnumerationAtL3) {
  constexpr int L = 3;
  const Lattice lat(L);
  const oracle::CosetTable table(L);
  ASSERT_EQ(table.stabilizers.size(), 256u);
  std::size_t anyon_free = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << (2 * L * L)); ++mask) {
    const auto syn = oracle::syndrome_of_mask(L, mask);
    bool clean = true;
    for (auto b : syn) clean &= b == 0;
    if (!clean) continue;
    ++anyon_free;
    ErrorConfig config(lat);
    for (std::size_t e = 0; e < config.size(); ++e) {
      if ((mask >> e) & 1) config.toggle(e);
    }
    const auto [wx, wy] = table.classify(mask);
    const HomologyClass h = homology_class(lat, config);
    ASSERT_EQ(h.h1, wx) << "mask " << mask;
    ASSERT_EQ(h.h2, wy) << "mask " << mask;
  }
  EXPECT_EQ(anyon_free, 1024u);  // 2^(L^2 - 1) * 4
}

}  // namespace
}  // namespace phidec
