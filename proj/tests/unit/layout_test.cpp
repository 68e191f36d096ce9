// Copyright 2026 The smpsde Authors.
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

#include "smpsde/layout.hpp"
#include "smpsde/prm.hpp"
#include "test_support.hpp"

namespace smpsde {
namespace {

using testing::catalog;
using testing::constant_table;

// Sup norms 2 and 1 on row 1, 3 on (2, 1): blocks in order (1,2), (1,3),
// (2,1), (2,3), (3,1), (3,2).
RateModel three_state() {
  return constant_table({{0, 2, 1}, {3, 0, 0.5}, {1, 1, 0}});
}

TEST(Layout, OffsetsFollowLexicographicPairOrder) {
  const MarkResolution res(three_state());
  const Interval a = res.interval_of(2, 1, 0.7, 0);
  EXPECT_EQ(a.lower, 3.0);
  EXPECT_EQ(a.upper, 6.0);
  EXPECT_EQ(res.interval_of(1, 2, 0.0, 0).lower, 0.0);
  EXPECT_EQ(res.interval_of(1, 2, 0.0, 0).upper, 2.0);
  EXPECT_EQ(res.row_start(2), 3.0);
  EXPECT_EQ(res.row_extent(2), 6.5);
  EXPECT_EQ(res.strip_height(), 8.5);
  const std::vector<std::pair<State, State>> order{{1, 2}, {1, 3}, {2, 1},
                                                   {2, 3}, {3, 1}, {3, 2}};
  EXPECT_EQ(res.pair_order(), order);
  EXPECT_THROW(res.interval_of(1, 1, 0.0, 0), std::invalid_argument);
}

TEST(Layout, ZeroRateGivesEmptyInterval) {
  const MarkResolution res(catalog("age_linear"));
  const Interval a = res.interval_of(1, 2, 0.0, 0);
  EXPECT_TRUE(a.empty());
  EXPECT_EQ(a.lower, 0.0);
  EXPECT_EQ(a.upper, 0.0);
}

TEST(Layout, ResolveMark) {
  const MarkResolution res(three_state());
  EXPECT_EQ(res.resolve_mark(1, 0.0, 0, 2.5), 3);
  EXPECT_EQ(res.resolve_mark(1, 0.0, 0, 0.0), 2);
  EXPECT_EQ(res.resolve_mark(1, 0.0, 0, 6.5), std::nullopt);
  // Right end of [0, 2) belongs to the next block, not to (1, 2).
  EXPECT_EQ(res.resolve_mark(1, 0.0, 0, 2.0), 3);
  EXPECT_EQ(res.resolve_mark(1, 0.0, 0, 3.0), std::nullopt);
  EXPECT_EQ(res.resolve_mark(2, 0.0, 0, 2.9), std::nullopt);
  EXPECT_EQ(res.resolve_mark(2, 0.0, 0, 6.0), 3);
}

TEST(Layout, ResolveRejectsUnusedPartOfBlock) {
  const MarkResolution res(catalog("age_linear"));
  // At age 0.5 the live part of block (1, 2) is [0, 0.5).
  EXPECT_EQ(res.resolve_mark(1, 0.5, 0, 0.49), 2);
  EXPECT_EQ(res.resolve_mark(1, 0.5, 0, 0.5), std::nullopt);
  EXPECT_EQ(res.resolve_mark(1, 0.5, 0, 1.9), std::nullopt);
}

TEST(Layout, OverlapLengths) {
  const MarkResolution res(catalog("age_linear"));
  // min(y, 2): rates 2 at y = 3 and 0.5 at y = 0.5.
  auto o = res.overlap_lengths(1, 3.0, 0, 3.0, 0);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0].target, 2);
  EXPECT_EQ(o[0].only_first, 0.0);
  EXPECT_EQ(o[0].only_second, 0.0);
  EXPECT_EQ(o[0].both, 2.0);
  o = res.overlap_lengths(1, 3.0, 0, 0.5, 0);
  EXPECT_DOUBLE_EQ(o[0].only_first, 1.5);
  EXPECT_EQ(o[0].only_second, 0.0);
  EXPECT_DOUBLE_EQ(o[0].both, 0.5);
  o = res.overlap_lengths(1, 0.0, 0, 0.5, 0);
  EXPECT_EQ(o[0].only_first, 0.0);
  EXPECT_DOUBLE_EQ(o[0].only_second, 0.5);
  EXPECT_EQ(o[0].both, 0.0);
}

// Brute-force indicator/target pair for a mark: scan every block of row i.
std::optional<State> brute_force(const MarkResolution& res, State i, double y, Count n,
                                 double v) {
  std::optional<State> hit;
  for (State j = 1; j <= res.num_states(); ++j) {
    if (j == i) continue;
    if (res.interval_of(i, j, y, n).contains(v)) {
      EXPECT_FALSE(hit.has_value()) << "overlapping intervals";
      hit = j;
    }
  }
  return hit;
}

TEST(Layout, RandomSweepMatchesBruteForce) {
  for (const char* name : {"weibull", "n_decaying", "ctmc3", "two_block"}) {
    const MarkResolution res(catalog(name));
    CounterRng rng(7, 1);
    for (int probe = 0; probe < 10000; ++probe) {
      const State i = static_cast<State>(1 + rng.next_u64() % res.num_states());
      const double y = 5.0 * rng.uniform();
      const Count n = static_cast<Count>(rng.next_u64() % 6);
      const double v = rng.uniform() * res.strip_height();
      const auto got = res.resolve_mark(i, y, n, v);
      ASSERT_EQ(got, brute_force(res, i, y, n, v)) << name;
      if (got) {
        EXPECT_NE(*got, i);
        EXPECT_GE(v, res.row_start(i));
        EXPECT_LT(v, res.row_extent(i));
      }
    }
  }
}

TEST(Layout, LengthsAndCommonLeftEnds) {
  const MarkResolution res(catalog("weibull"));
  for (double y : {0.0, 0.3, 1.1, 4.0}) {
    for (State i = 1; i <= 3; ++i) {
      for (State j = 1; j <= 3; ++j) {
        if (i == j) continue;
        const Interval a = res.interval_of(i, j, y, 0);
        EXPECT_NEAR(a.length(), res.model().rate(i, j, y, 0), 1e-15);
        EXPECT_EQ(a.lower, res.interval_of(i, j, 2.5, 0).lower);
        EXPECT_LE(a.upper, res.row_extent(i));
      }
    }
  }
}

}  // namespace
}  // namespace smpsde
