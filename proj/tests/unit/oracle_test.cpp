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

#include <cmath>

#include "smpsde/oracle.hpp"
#include "smpsde/stats.hpp"
#include "test_support.hpp"

namespace smpsde {
namespace {

using testing::catalog;
using testing::constant_table;

TEST(Oracle, InvertsClosedForms) {
  const OracleSampler ctmc(catalog("ctmc2"), 1);
  // gamma = 2y: u = 1 - e^{-1} inverts to y = 0.5.
  EXPECT_NEAR(ctmc.invert_holding_cdf(1, 0, -std::expm1(-1.0)), 0.5, 1e-8);
  EXPECT_EQ(ctmc.invert_holding_cdf(1, 0, 0.0), 0.0);
  // Bisection stops at a 1e-10 bracket.
  EXPECT_NEAR(ctmc.invert_holding_cdf(1, 0, 1e-12), 5e-13, 1e-10);
  const OracleSampler ramp(catalog("age_linear"), 1);
  // gamma = y^2 / 2 = 0.5 at y = 1.
  EXPECT_NEAR(ramp.invert_holding_cdf(1, 0, -std::expm1(-0.5)), 1.0, 1e-8);
  EXPECT_THROW(ramp.invert_holding_cdf(1, 0, 1.0), std::domain_error);
}

TEST(Oracle, RoundTripThroughCdf) {
  const RateModel m = catalog("weibull");
  const OracleSampler o(m, 3);
  CounterRng rng(12, 0);
  for (int k = 0; k < 1000; ++k) {
    const double u = rng.uniform();
    const State i = 1 + k % 3;
    const double y = o.invert_holding_cdf(i, 0, u);
    EXPECT_NEAR(holding_cdf(m, i, y, 0), u, 1e-8);
  }
}

TEST(Oracle, EntryAgeConditionsOnSurvival) {
  // Rates are flat past the knee at 2, so the residual holding time from
  // age 3 is Exp(2) whatever the past.
  const OracleSampler o(catalog("age_linear"), 1);
  EXPECT_NEAR(o.invert_holding_cdf(1, 0, -std::expm1(-1.0), 3.0), 0.5, 1e-8);
}

TEST(Oracle, NextStateFrequencies) {
  OracleSampler o(catalog("ctmc3"), 9);
  const int n = 100000;
  int to2 = 0;
  for (int k = 0; k < n; ++k) {
    const auto next = o.sample_next_state(1, 0.4, 0);
    EXPECT_FALSE(next.degenerate);
    to2 += next.state == 2;
  }
  const double p = 2.0 / 3.0;
  EXPECT_NEAR(static_cast<double>(to2) / n, p, 3.0 * binomial_standard_error(p, n));
  OracleSampler two(catalog("ctmc2"), 9);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(two.sample_next_state(1, 0.1, 0).state, 2);
}

TEST(Oracle, DegenerateRowIsFlagged) {
  OracleSampler o(catalog("age_linear"), 1);
  const auto next = o.sample_next_state(1, 0.0, 0);
  EXPECT_TRUE(next.degenerate);
  EXPECT_EQ(next.state, 1);
  EXPECT_EQ(o.degenerate_events(), 1u);
}

TEST(Oracle, ZeroRatesNeverJump) {
  OracleSampler o(constant_table({{0, 0}, {0, 0}}), 1);
  EXPECT_TRUE(o.simulate_path({1, 0.0, 0}, 10.0).jumps.empty());
}

TEST(Oracle, BracketFailureOnBoundedHazard) {
  StepTable t;
  t.entries.resize(4);
  t.entries[1] = {{0.0, 1.0}, {{1.0, 0.0}}};
  t.entries[2] = {{0.0}, {{1.0}}};
  OracleOptions opts;
  opts.max_age = 64;
  const OracleSampler o(RateModel::from_table("fading", 2, t), 1, 0, opts);
  // gamma_1 never exceeds 1, so u > 1 - 1/e has no finite inverse.
  EXPECT_THROW(o.invert_holding_cdf(1, 0, 0.9), BracketError);
}

TEST(Oracle, DeterministicAndIndependentOfPointStreams) {
  const RateModel m = catalog("n_decaying");
  OracleSampler a(m, 5, 2), b(m, 5, 2), c(m, 5, 3);
  const auto ta = a.simulate_path({1, 0.0, 0}, 20.0);
  EXPECT_EQ(ta, b.simulate_path({1, 0.0, 0}, 20.0));
  EXPECT_NE(ta, c.simulate_path({1, 0.0, 0}, 20.0));
  EXPECT_NE(oracle_key(5), 5u);
}

TEST(Oracle, FirstJumpMatchesExponential) {
  OracleSampler o(catalog("ctmc2"), 4);
  SolverOptions opts;
  opts.stop_after = 1;
  std::vector<double> t1;
  for (int k = 0; k < 20000; ++k) {
    const auto t = o.simulate_path({2, 0.0, 0}, INFINITY, opts);
    ASSERT_EQ(t.jumps.size(), 1u);
    EXPECT_EQ(t.jumps[0].state, 1);
    t1.push_back(t.jumps[0].time);
  }
  const auto ks = ks_one_sample(t1, [](double y) { return -std::expm1(-3.0 * y); });
  EXPECT_TRUE(ks.passes(0.01)) << ks.statistic;
}

}  // namespace
}  // namespace smpsde
