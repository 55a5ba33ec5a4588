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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.h"

namespace phidec {
namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

SyndromePlane plane_with(int L, std::initializer_list<Site> sites) {
  SyndromePlane s(static_cast<std::size_t>(L) * L, 0);
  for (Site v : sites) s[v.y * L + v.x] = 1;
  return s;
}

TEST(FieldScheduleTest, UpdatesPerRound) {
  EXPECT_EQ(field_updates_per_round(4), 4);
  EXPECT_EQ(field_updates_per_round(8), 9);
  EXPECT_EQ(field_updates_per_round(12), 13);
  EXPECT_EQ(field_updates_per_round(16), 16);
  EXPECT_EQ(field_updates_per_round(24), 22);
  EXPECT_EQ(field_updates_per_round(2, 0.1), 1);
  EXPECT_EQ(field_updates_per_round(12, 2.0), 26);
}

TEST(FieldScheduleTest, DefaultHeight) {
  EXPECT_EQ(default_field_height(4), 4);
  EXPECT_EQ(default_field_height(8), 4);
  EXPECT_EQ(default_field_height(12), 6);
  EXPECT_EQ(default_field_height(24), 12);
}

TEST(FieldStepTest, ZeroFieldWithoutSourcesStaysZero) {
  PhiField field(5, 4);
  const SyndromePlane none(25, 0);
  for (int i = 0; i < 3; ++i) field_step(field, none);
  for (double v : field.values()) EXPECT_EQ(v, 0.0);
}

TEST(FieldStepTest, TwoHandIteratedSweeps) {
  PhiField field(6, 4);
  const SyndromePlane src = plane_with(6, {{2, 3}});
  field_step(field, src);
  for (int z = 0; z < 4; ++z) {
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 6; ++x) {
        EXPECT_EQ(field.at(x, y, z), x == 2 && y == 3 && z == 0 ? 1.0 : 0.0);
      }
    }
  }
  field_step(field, src);
  // Mirror floor: the source sees itself below, so it gains 1/6 on top of
  // the new +1.
  EXPECT_DOUBLE_EQ(field.at(2, 3, 0), 1.0 + 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(field.at(3, 3, 0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(field.at(1, 3, 0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(field.at(2, 4, 0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(field.at(2, 2, 0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(field.at(2, 3, 1), 1.0 / 6.0);
  EXPECT_EQ(field.at(3, 4, 0), 0.0);
  EXPECT_EQ(field.at(2, 3, 2), 0.0);
}

TEST(FieldStepTest, WrapsAroundTheTorus) {
  PhiField field(4, 4);
  const SyndromePlane src = plane_with(4, {{0, 0}});
  field_step(field, src);
  field_step(field, src);
  EXPECT_DOUBLE_EQ(field.at(3, 0, 0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(field.at(0, 3, 0), 1.0 / 6.0);
}

TEST(FieldStepTest, ConvergesToLinearSolve) {
  constexpr int L = 4, H = 4;
  const SyndromePlane src = plane_with(L, {{0, 0}, {2, 1}, {3, 3}});
  const Eigen::VectorXd exact = oracle::field_fixed_point(L, H, {0, 6, 15});
  PhiField field(L, H);
  for (int i = 0; i < 2000; ++i) field_step(field, src);
  std::vector<double> ref(exact.data(), exact.data() + exact.size());
  EXPECT_LT(max_abs_diff(field.values(), ref), 1e-6);
}

TEST(FieldStepTest, LinearInSources) {
  constexpr int L = 4, H = 4;
  const SyndromePlane a = plane_with(L, {{0, 0}, {1, 2}});
  const SyndromePlane b = plane_with(L, {{3, 1}});
  const SyndromePlane ab = plane_with(L, {{0, 0}, {1, 2}, {3, 1}});
  PhiField fa(L, H), fb(L, H), fab(L, H);
  for (int i = 0; i < 37; ++i) {
    field_step(fa, a);
    field_step(fb, b);
    field_step(fab, ab);
  }
  for (std::size_t i = 0; i < fab.num_cells(); ++i) {
    EXPECT_NEAR(fab.values()[i], fa.values()[i] + fb.values()[i], 1e-12);
  }
}

TEST(FieldStepTest, TranslationCovariant) {
  constexpr int L = 6, H = 4;
  const SyndromePlane a = plane_with(L, {{0, 0}, {2, 1}});
  const SyndromePlane shifted = plane_with(L, {{3, 2}, {5, 3}});
  PhiField fa(L, H), fs(L, H);
  for (int i = 0; i < 300; ++i) {
    field_step(fa, a);
    field_step(fs, shifted);
  }
  for (int z = 0; z < H; ++z) {
    for (int y = 0; y < L; ++y) {
      for (int x = 0; x < L; ++x) {
        EXPECT_NEAR(fa.at(x, y, z), fs.at((x + 3) % L, (y + 2) % L, z),
                    1e-12);
      }
    }
  }
}

TEST(FieldStepTest, SuccessiveDifferencesShrinkAfterBurnIn) {
  for (int L : {4, 6, 8}) {
    const int H = default_field_height(L);
    const SyndromePlane src = plane_with(L, {{0, 0}, {1, 3}});
    PhiField field(L, H);
    std::vector<double> prev(field.values().begin(), field.values().end());
    double last = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 400; ++i) {
      field_step(field, src);
      const double d = max_abs_diff(field.values(), prev);
      if (i >= 20) EXPECT_LE(d, last * (1 + 1e-9)) << "L=" << L << " i=" << i;
      last = d;
      prev.assign(field.values().begin(), field.values().end());
    }
  }
}

TEST(FieldStepTest, DrainsWithoutSources) {
  constexpr int L = 6;
  PhiField field(L, 4);
  const SyndromePlane src = plane_with(L, {{1, 1}, {4, 2}});
  for (int i = 0; i < 50; ++i) field_step(field, src);
  const SyndromePlane none(L * L, 0);
  double prev_max = *std::max_element(field.values().begin(),
                                      field.values().end());
  for (int i = 0; i < 300; ++i) {
    field_step(field, none);
    const double m =
        *std::max_element(field.values().begin(), field.values().end());
    EXPECT_LE(m, prev_max);
    for (double v : field.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_TRUE(std::isfinite(v));
    }
    prev_max = m;
  }
  EXPECT_LT(prev_max, 0.05);
}

TEST(LocalFieldUpdateTest, SingleSourceFromZero) {
  PhiField field(5, 4);
  const SyndromePlane src = plane_with(5, {{1, 2}});
  local_field_update(field, field.cell_index(1, 2, 0), src);
  for (std::size_t i = 0; i < field.num_cells(); ++i) {
    EXPECT_EQ(field.values()[i], i == field.cell_index(1, 2, 0) ? 1.0 : 0.0);
  }
}

TEST(LocalFieldUpdateTest, FixedPointIsOrderIndependent) {
  constexpr int L = 4, H = 4;
  const SyndromePlane src = plane_with(L, {{1, 1}, {3, 2}});
  const Eigen::VectorXd exact = oracle::field_fixed_point(L, H, {5, 11});
  PhiField field(L, H);
  std::copy(exact.data(), exact.data() + exact.size(),
            field.mutable_values().begin());
  std::vector<std::size_t> order(field.num_cells());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(4);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t cell : order) local_field_update(field, cell, src);
  for (std::size_t i = 0; i < field.num_cells(); ++i) {
    EXPECT_NEAR(field.values()[i], exact(i), 1e-12);
  }
}

TEST(LocalFieldUpdateTest, RandomSweepsConvergeToLinearSolve) {
  constexpr int L = 4, H = 4;
  const SyndromePlane src = plane_with(L, {{0, 3}, {2, 2}});
  const Eigen::VectorXd exact = oracle::field_fixed_point(L, H, {12, 10});
  PhiField field(L, H);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> pick(0, field.num_cells() - 1);
  for (int i = 0; i < 400000; ++i) local_field_update(field, pick(rng), src);
  std::vector<double> ref(exact.data(), exact.data() + exact.size());
  EXPECT_LT(max_abs_diff(field.values(), ref), 1e-6);
}

TEST(ExplicitFieldTest, NeighborsOfALoneAnyonHoldOne) {
  const Lattice lat(8);
  SyndromePlane s(64, 0);
  s[lat.site_index(3, 4)] = 1;
  for (double alpha : {0.5, 1.0, 1.05, 2.0}) {
    const auto f = explicit_field(lat, s, alpha);
    for (std::size_t n : lat.site_neighbors(lat.site_index(3, 4))) {
      EXPECT_DOUBLE_EQ(f[n], 1.0);
    }
    EXPECT_DOUBLE_EQ(f[lat.site_index(3, 4)], 1.0);
  }
}

TEST(ExplicitFieldTest, TwoTermSum) {
  const Lattice lat(8);
  SyndromePlane s(64, 0);
  s[lat.site_index(0, 0)] = 1;
  s[lat.site_index(3, 0)] = 1;
  const auto f = explicit_field(lat, s, 1.0);
  EXPECT_DOUBLE_EQ(f[lat.site_index(1, 0)], 1.5);
}

TEST(ExplicitFieldTest, MatchesBruteForceSuperposition) {
  constexpr int L = 6;
  const Lattice lat(L);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    SyndromePlane s(L * L, 0);
    std::vector<std::pair<int, int>> anyons;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) {
      const int x = rng() % L, y = rng() % L;
      if (s[y * L + x]) continue;
      s[y * L + x] = 1;
      anyons.emplace_back(x, y);
    }
    const auto f = explicit_field(lat, s, 1.05);
    const auto ref = oracle::explicit_field_brute(L, anyons, 1.05);
    for (int i = 0; i < L * L; ++i) EXPECT_NEAR(f[i], ref[i], 1e-12);
  }
}

TEST(ExplicitFieldTest, ArgmaxIgnoresGlobalOffset) {
  const Lattice lat(10);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    SyndromePlane s(100, 0);
    for (int k = 0; k < 6; ++k) s[rng() % 100] = 1;
    const auto f = explicit_field(lat, s, 1.05);
    for (std::size_t a = 0; a < 100; ++a) {
      if (!s[a]) continue;
      const auto n = lat.site_neighbors(a);
      auto argmax = [&](double offset) {
        int best = 0;
        for (int k = 1; k < 4; ++k) {
          if (f[n[k]] + offset > f[n[best]] + offset) best = k;
        }
        return best;
      };
      EXPECT_EQ(argmax(0.0), argmax(7.25));
    }
  }
}

TEST(ExplicitFieldTest, RejectsNonPositiveAlpha) {
  const Lattice lat(4);
  EXPECT_THROW(explicit_field(lat, SyndromePlane(16, 0), 0.0),
               std::invalid_argument);
}

TEST(FieldSnapshotTest, OneLinePerCell) {
  PhiField field(3, 2);
  field_step(field, plane_with(3, {{1, 1}}));
  std::ostringstream out;
  write_field_snapshot(out, field);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "# L=3 H=2");
  int lines = 0;
  int x, y, z;
  double v, total = 0.0;
  while (in >> x >> y >> z >> v) {
    ++lines;
    total += v;
  }
  EXPECT_EQ(lines, 18);
  EXPECT_DOUBLE_EQ(total, 1.0);
}

}  // namespace
}  // namespace phidec
