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

#include "smpsde/layout.hpp"
#include "smpsde/prm.hpp"
#include "smpsde/solver.hpp"
#include "smpsde/stats.hpp"
#include "test_support.hpp"

namespace smpsde {
namespace {

using testing::catalog;
using testing::constant_table;

void expect_well_formed(const Trajectory& t) {
  double prev = 0.0;
  State s = t.initial.state;
  for (const auto& j : t.jumps) {
    EXPECT_GT(j.time, prev);
    EXPECT_LE(j.time, t.horizon);
    EXPECT_NE(j.state, s);
    prev = j.time;
    s = j.state;
  }
}

TEST(SimulatePath, ZeroRatesNeverJump) {
  const MarkResolution res(constant_table({{0, 0}, {0, 0}}));
  PointStream s(1, 0, res.strip_height());
  const auto t = simulate_path(res, s, {2, 1.5, 4}, 10.0);
  EXPECT_TRUE(t.jumps.empty());
  const auto z = state_at(t, 3.0);
  EXPECT_EQ(z, (AugmentedState{2, 4.5, 4}));
}

TEST(SimulatePath, FirstJumpMeanIsInverseRate) {
  const MarkResolution res(catalog("ctmc2"));
  const PointStream base(2, 0, res.strip_height());
  SolverOptions opts;
  opts.stop_after = 1;
  std::vector<double> t1;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    PointStream s = base.child(r);
    const auto t = simulate_path(res, s, {1, 0.0, 0}, 1e9, opts);
    ASSERT_EQ(t.jumps.size(), 1u);
    EXPECT_EQ(t.horizon, t.jumps[0].time);
    t1.push_back(t.jumps[0].time);
  }
  const EmpiricalDistribution d(t1);
  EXPECT_NEAR(d.mean(), 0.5, 3.0 * d.standard_error());
}

TEST(SimulatePath, Deterministic) {
  const MarkResolution res(catalog("weibull"));
  PointStream a(77, 5, res.strip_height());
  PointStream b(77, 5, res.strip_height());
  const auto ta = simulate_path(res, a, {2, 0.3, 1}, 50.0);
  const auto tb = simulate_path(res, b, {2, 0.3, 1}, 50.0);
  EXPECT_EQ(ta, tb);
  expect_well_formed(ta);
  EXPECT_FALSE(ta.jumps.empty());
}

TEST(SimulatePath, RejectsBadInputs) {
  const MarkResolution res(catalog("ctmc2"));
  PointStream s(1, 0, res.strip_height());
  EXPECT_THROW(simulate_path(res, s, {3, 0.0, 0}, 1.0), std::invalid_argument);
  EXPECT_THROW(simulate_path(res, s, {1, -1.0, 0}, 1.0), std::invalid_argument);
  EXPECT_THROW(simulate_path(res, s, {1, 0.0, 0}, 0.0), std::invalid_argument);
  EXPECT_THROW(simulate_path(res, s, {1, 0.0, 0}, INFINITY), std::invalid_argument);
  PointStream short_strip(1, 0, 1.0);
  EXPECT_THROW(simulate_path(res, short_strip, {1, 0.0, 0}, 1.0), std::invalid_argument);
}

TEST(SimulatePath, CircuitBreaker) {
  const MarkResolution res(catalog("ctmc2"));
  PointStream s(1, 0, res.strip_height());
  SolverOptions opts;
  opts.max_jumps = 5;
  EXPECT_THROW(simulate_path(res, s, {1, 0.0, 0}, 1000.0, opts), ExplosionSuspected);
}

TEST(SimulatePath, InitialAgeShiftsRates) {
  // Past the knee min(y, 2) is flat at 2, so an old start holds Exp(2).
  const MarkResolution res(catalog("age_linear"));
  const PointStream base(4, 0, res.strip_height());
  SolverOptions opts;
  opts.stop_after = 1;
  std::vector<double> t1;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    PointStream s = base.child(r);
    t1.push_back(simulate_path(res, s, {1, 3.0, 0}, 1e9, opts).jumps[0].time);
  }
  const auto ks = ks_one_sample(t1, [](double y) { return -std::expm1(-2.0 * y); });
  EXPECT_TRUE(ks.passes(0.01)) << ks.statistic;
}

TEST(StateAt, JumpTimesAndLimits) {
  const MarkResolution res(catalog("ctmc3"));
  PointStream s(8, 0, res.strip_height());
  const auto t = simulate_path(res, s, {1, 0.25, 2}, 20.0);
  ASSERT_GE(t.jumps.size(), 3u);
  EXPECT_EQ(t.jump_time(0), -0.25);
  for (std::size_t n = 1; n <= t.jumps.size(); ++n) {
    const double tn = t.jump_time(n);
    const auto at = state_at(t, tn);
    EXPECT_EQ(at.age, 0.0);
    EXPECT_EQ(at.count, 2 + static_cast<Count>(n));
    EXPECT_EQ(at.state, t.state_after(n));
    const auto before = state_at(t, std::nextafter(tn, 0.0));
    EXPECT_NEAR(before.age, tn - t.jump_time(n - 1), 1e-12);
    EXPECT_EQ(before.count, 1 + static_cast<Count>(n));
  }
  const double t1 = t.jump_time(1);
  EXPECT_EQ(state_at(t, 0.5 * t1), (AugmentedState{1, 0.25 + 0.5 * t1, 2}));
  EXPECT_THROW(state_at(t, -0.1), std::out_of_range);
  EXPECT_THROW(state_at(t, 20.1), std::out_of_range);
}

TEST(Sojourns, LastOneIsCensored) {
  const MarkResolution res(catalog("ctmc2"));
  PointStream s(3, 0, res.strip_height());
  const auto t = simulate_path(res, s, {1, 0.5, 0}, 5.0);
  const auto soj = t.sojourns();
  ASSERT_EQ(soj.size(), t.jumps.size() + 1);
  EXPECT_FALSE(soj.front().fresh);
  EXPECT_EQ(soj.front().entry_age, 0.5);
  EXPECT_TRUE(soj.back().censored());
  EXPECT_NEAR(soj.back().start + soj.back().duration, 5.0, 1e-12);
  for (std::size_t k = 0; k + 1 < soj.size(); ++k) EXPECT_FALSE(soj[k].censored());
}

TEST(HoldingSamples, ExponentialMean) {
  const MarkResolution res(catalog("ctmc2"));
  PointStream s(5, 0, res.strip_height());
  const EmpiricalDistribution d(holding_time_samples(res, 1, 0, 100000, s));
  EXPECT_NEAR(d.mean(), 0.5, 3.0 * d.standard_error());
}

TEST(HoldingSamples, RampCdfAtOne) {
  const MarkResolution res(catalog("age_linear"));
  PointStream s(6, 0, res.strip_height());
  const EmpiricalDistribution d(holding_time_samples(res, 1, 0, 100000, s));
  EXPECT_NEAR(d.ecdf(1.0), -std::expm1(-0.5), 0.005);
}

TEST(HoldingSamples, Deterministic) {
  const MarkResolution res(catalog("n_decaying"));
  PointStream a(5, 2, res.strip_height());
  PointStream b(5, 2, res.strip_height());
  EXPECT_EQ(holding_time_samples(res, 3, 2, 100, a), holding_time_samples(res, 3, 2, 100, b));
  EXPECT_THROW(holding_time_samples(res, 3, 2, 0, a), std::invalid_argument);
}

}  // namespace
}  // namespace smpsde
