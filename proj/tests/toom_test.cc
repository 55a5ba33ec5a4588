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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace phidec {
namespace {

BinaryGrid random_grid(int L, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution bit(density);
  BinaryGrid g(L);
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) g.set(x, y, bit(rng));
  }
  return g;
}

double mean_survival(int L, double noise, int n, double cap) {
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    sum += toom_survival(L, noise, cap, 1000 + i).failure_time;
  }
  return sum / n;
}

TEST(BinaryGridTest, HoldsLSquaredCellsOnATorus) {
  BinaryGrid g(5);
  EXPECT_EQ(g.num_cells(), 25u);
  EXPECT_EQ(g.count_ones(), 0u);
  g.set(-1, 6, true);
  EXPECT_TRUE(g.at(4, 1));
  EXPECT_EQ(BinaryGrid(3, true).count_ones(), 9u);
}

TEST(NecStepTest, UniformGridsAreFixedPoints) {
  EXPECT_EQ(nec_step(BinaryGrid(7, false)), BinaryGrid(7, false));
  EXPECT_EQ(nec_step(BinaryGrid(7, true)), BinaryGrid(7, true));
}

TEST(NecStepTest, SingleCellErodesInOneStep) {
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      BinaryGrid g(6);
      g.set(x, y, true);
      EXPECT_EQ(nec_step(g).count_ones(), 0u) << x << "," << y;
    }
  }
}

TEST(NecStepTest, MajorityOfNorthEastCenter) {
  BinaryGrid g(5);
  g.set(2, 2, true);  // center of (2,2)
  g.set(3, 2, true);  // east of (2,2)
  const BinaryGrid n = nec_step(g);
  EXPECT_TRUE(n.at(2, 2));
  // (2,3) has north (2,2) = 1, east (3,3) = 0, center 0.
  EXPECT_FALSE(n.at(2, 3));
  // (1,2) has east (2,2) = 1, north (1,1) = 0, center 0.
  EXPECT_FALSE(n.at(1, 2));
  EXPECT_EQ(n.count_ones(), 1u);
  // With north and east set, a zero center flips.
  BinaryGrid h(5);
  h.set(2, 1, true);  // north of (2,2)
  h.set(3, 2, true);  // east of (2,2)
  EXPECT_TRUE(nec_step(h).at(2, 2));
}

TEST(NecStepTest, NeverCreatesOnesFromAllZeroNeighborhoods) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryGrid g = random_grid(9, 0.3, rng);
    const BinaryGrid n = nec_step(g);
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 9; ++x) {
        if (!g.at(x, y - 1) && !g.at(x + 1, y) && !g.at(x, y)) {
          ASSERT_FALSE(n.at(x, y));
        }
      }
    }
  }
}

TEST(NecStepTest, ErodesMinorityDensityAtL64) {
  constexpr int L = 64;
  std::mt19937_64 rng(17);
  int eroded = 0;
  for (int trial = 0; trial < 200; ++trial) {
    BinaryGrid g = random_grid(L, 0.2, rng);
    for (int t = 0; t < 4 * L && g.count_ones() > 0; ++t) g = nec_step(g);
    eroded += g.count_ones() == 0;
  }
  EXPECT_GE(eroded, 198);
}

TEST(ToomSurvivalTest, NoiselessNeverFails) {
  const SurvivalRecord r = toom_survival(16, 0.0, 1000, 1);
  EXPECT_TRUE(r.censored);
  EXPECT_EQ(r.failure_time, 1000);
  EXPECT_EQ(r.mode, Mode::kToom);
  EXPECT_EQ(r.L, 16);
}

TEST(ToomSurvivalTest, RejectsNoiseOfOneHalfOrMore) {
  EXPECT_THROW(toom_survival(8, 0.5, 10, 1), std::invalid_argument);
  EXPECT_THROW(toom_survival(8, -0.1, 10, 1), std::invalid_argument);
}

TEST(ToomSurvivalTest, ReproducibleFromSeed) {
  const SurvivalRecord a = toom_survival(6, 0.15, 1e6, 42);
  const SurvivalRecord b = toom_survival(6, 0.15, 1e6, 42);
  EXPECT_EQ(a.failure_time, b.failure_time);
  EXPECT_FALSE(a.censored);
}

TEST(ToomSurvivalTest, SurvivalFallsAsNoiseRises) {
  const double s2 = mean_survival(4, 0.02, 50, 1e7);
  const double s10 = mean_survival(4, 0.10, 200, 1e7);
  const double s30 = mean_survival(4, 0.30, 200, 1e7);
  EXPECT_GT(s2, s10);
  EXPECT_GT(s10, s30);
}

TEST(ToomSurvivalTest, SurvivalGrowsWithSize) {
  // At 2% every size above 4 outlives any practical cap.
  const double s2 = mean_survival(2, 0.02, 200, 1e7);
  const double s3 = mean_survival(3, 0.02, 200, 1e7);
  EXPECT_GT(s3, 2 * s2);
  // At 10% larger sizes can be compared directly.
  EXPECT_GT(mean_survival(8, 0.10, 100, 1e7), mean_survival(4, 0.10, 100, 1e7));
}

}  // namespace
}  // namespace phidec
