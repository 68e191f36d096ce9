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
#include <sstream>

#include "smpsde/coupling.hpp"
#include "smpsde/trajectory_io.hpp"
#include "test_support.hpp"

namespace smpsde {
namespace {

using testing::catalog;

TEST(Coupled, IdenticalInitialsStayTogether) {
  const MarkResolution res(catalog("weibull"));
  const PointStream base(3, 0, res.strip_height());
  for (std::uint64_t r = 0; r < 200; ++r) {
    PointStream s = base.child(r);
    const AugmentedState z{2, 0.4, 1};
    const auto p = simulate_coupled(res, s, z, z, 10.0);
    EXPECT_EQ(p.first, p.second);
    ASSERT_TRUE(p.merge_time.has_value());
    EXPECT_EQ(*p.merge_time, 0.0);
    EXPECT_EQ(p.simultaneous_jumps(), p.events.size());
  }
}

TEST(Coupled, MarginalsMatchSingleSolver) {
  // With disjoint states no mark triggers both, and each marginal reads the
  // same points as a lone path would.
  const MarkResolution res(catalog("ctmc3"));
  PointStream a(9, 4, res.strip_height());
  PointStream b(9, 4, res.strip_height());
  PointStream c(9, 4, res.strip_height());
  const auto p = simulate_coupled(res, a, {1, 0.0, 0}, {3, 0.0, 0}, 5.0);
  EXPECT_EQ(p.first, simulate_path(res, b, {1, 0.0, 0}, 5.0));
  EXPECT_EQ(p.second, simulate_path(res, c, {3, 0.0, 0}, 5.0));
}

TEST(Coupled, CtmcSameStateMergesAtFirstJump) {
  // ctmc2 from (1, 2) and (1, 0): the only exit of state 1 has a constant
  // rate, so the first accepted mark moves both.
  const MarkResolution res(catalog("ctmc2"));
  const PointStream base(5, 0, res.strip_height());
  for (std::uint64_t r = 0; r < 500; ++r) {
    PointStream s = base.child(r);
    const auto p = simulate_coupled(res, s, {1, 2.0, 0}, {1, 0.0, 0}, 20.0);
    ASSERT_FALSE(p.events.empty());
    EXPECT_EQ(p.events.front().mover, Mover::both);
    ASSERT_TRUE(p.merge_time.has_value());
    EXPECT_EQ(*p.merge_time, p.events.front().time);
    EXPECT_EQ(*p.meeting_time, 0.0);
  }
}

TEST(Coupled, DisjointBlocksNeverJumpTogether) {
  const MarkResolution res(catalog("two_block"));
  const PointStream base(6, 0, res.strip_height());
  std::vector<CoupledPath> paths;
  for (std::uint64_t r = 0; r < 200; ++r) {
    PointStream s = base.child(r);
    paths.push_back(simulate_coupled(res, s, {1, 0.0, 0}, {3, 0.0, 0}, 20.0));
  }
  const auto stats = meeting_stats(paths);
  EXPECT_EQ(stats.simultaneous_jumps, 0u);
  EXPECT_EQ(stats.met, 0u);
  EXPECT_GT(stats.events, 0u);
  EXPECT_FALSE(stats.mean_meeting_time.has_value());
}

TEST(Coupled, MeetingStatsCountsMergeKinds) {
  const MarkResolution res(catalog("ctmc2"));
  const PointStream base(7, 0, res.strip_height());
  std::vector<CoupledPath> paths;
  for (std::uint64_t r = 0; r < 10; ++r) {
    PointStream s = base.child(r);
    paths.push_back(simulate_coupled(res, s, {1, 0.0, 0}, {1, 0.0, 0}, 5.0));
  }
  const auto stats = meeting_stats(paths);
  EXPECT_EQ(stats.paths, 10u);
  EXPECT_EQ(stats.merged_at_start, 10u);
  EXPECT_EQ(stats.permanence_violations, 0u);
  EXPECT_EQ(*stats.median_merge_time, 0.0);
  const auto j = to_json(stats);
  EXPECT_EQ(j.at("paths").get<int>(), 10);
}

TEST(Generator, ConstantIsAnnihilated) {
  const RateModel m = catalog("weibull");
  EXPECT_EQ(generator_apply(m, constant_function(3.0), {1, 0.7, 0}, {2, 0.1, 0}), 0.0);
  EXPECT_EQ(generator_apply(m, constant_function(3.0), {1, 0.7, 0}, {1, 0.1, 0}), 0.0);
}

TEST(Generator, JointJumpToSharedTarget) {
  // Both in state 1 of ctmc2: only the shared channel at rate min(2, 2) = 2
  // reaches (2, 2).
  const RateModel m = catalog("ctmc2");
  EXPECT_DOUBLE_EQ(
      generator_apply(m, product_state_indicator(2, 2), {1, 0.3, 0}, {1, 1.1, 0}), 2.0);
}

TEST(Generator, CoefficientsAreNonnegativeAndPreserveMarginals) {
  const RateModel m = catalog("weibull");
  const AugmentedState z1{1, 0.4, 0}, z2{1, 2.5, 0};
  std::vector<double> out1(4, 0.0), out2(4, 0.0);
  for (const auto& t : generator_terms(m, z1, z2)) {
    EXPECT_GE(t.coefficient, 0.0);
    if (t.mover != Mover::second) out1[t.target] += t.coefficient;
    if (t.mover != Mover::first) out2[t.target] += t.coefficient;
  }
  for (State j = 2; j <= 3; ++j) {
    EXPECT_NEAR(out1[j], m.rate(1, j, z1.age, 0), 1e-12);
    EXPECT_NEAR(out2[j], m.rate(1, j, z2.age, 0), 1e-12);
  }
}

TEST(Generator, SeparableFunctionSplitsIntoMarginals) {
  // phi = f(z1) + g(z2) must give L1 f + L2 g, each computed directly.
  const RateModel m = catalog("weibull");
  auto f = [](const AugmentedState& z) { return z.state == 1 ? std::sin(z.age) : 0.5 * z.state; };
  auto df = [](const AugmentedState& z) { return z.state == 1 ? std::cos(z.age) : 0.0; };
  auto g = [](const AugmentedState& z) { return z.state == 3 ? z.age * z.age : 0.0; };
  auto dg = [](const AugmentedState& z) { return z.state == 3 ? 2.0 * z.age : 0.0; };
  TestFunction phi;
  phi.value = [&](const AugmentedState& a, const AugmentedState& b) { return f(a) + g(b); };
  phi.d_age1 = [&](const AugmentedState& a, const AugmentedState&) { return df(a); };
  phi.d_age2 = [&](const AugmentedState&, const AugmentedState& b) { return dg(b); };
  auto marginal = [&](auto fn, auto dfn, const AugmentedState& z) {
    double total = dfn(z);
    for (State j = 1; j <= 3; ++j) {
      if (j == z.state) continue;
      total += m.rate(z.state, j, z.age, z.count) * (fn(AugmentedState{j, 0.0, z.count + 1}) - fn(z));
    }
    return total;
  };
  for (const auto& [z1, z2] : std::vector<std::pair<AugmentedState, AugmentedState>>{
           {{1, 0.4, 0}, {3, 0.9, 2}}, {{3, 0.2, 1}, {3, 1.7, 1}}, {{1, 0.5, 0}, {1, 3.0, 0}}}) {
    EXPECT_NEAR(generator_apply(m, phi, z1, z2), marginal(f, df, z1) + marginal(g, dg, z2),
                1e-12);
  }
}

TEST(TestFunctionDerivatives, FiniteDifferenceFallback) {
  TestFunction phi;
  phi.value = [](const AugmentedState& a, const AugmentedState& b) {
    return a.age * a.age * a.age + std::exp(b.age);
  };
  EXPECT_NEAR(phi.derivative_age1({1, 0.5, 0}, {1, 0.2, 0}), 0.75, 1e-6);
  EXPECT_NEAR(phi.derivative_age2({1, 0.5, 0}, {1, 0.2, 0}), std::exp(0.2), 1e-6);
  // Near age 0 the difference is one-sided and must not evaluate y < 0.
  phi.value = [](const AugmentedState& a, const AugmentedState&) {
    if (a.age < 0.0) throw std::domain_error("negative age");
    return std::sqrt(a.age + 1.0);
  };
  EXPECT_NEAR(phi.derivative_age1({1, 0.0, 0}, {1, 0.0, 0}), 0.5, 1e-6);
}

TEST(Dynkin, ConstantFunctionHasZeroResidual) {
  const MarkResolution res(catalog("ctmc2"));
  const PointStream base(1, 0, res.strip_height());
  const auto est =
      dynkin_residual(res, constant_function(1.0), {1, 0.0, 0}, {2, 0.0, 0}, 0.05, 1000, base);
  EXPECT_EQ(est.residual, 0.0);
  EXPECT_EQ(est.standard_error, 0.0);
  EXPECT_EQ(est.reps, 1000u);
}

TEST(Dynkin, IndicatorPassesHalving) {
  const MarkResolution res(catalog("age_linear"));
  const PointStream base(2, 0, res.strip_height());
  const auto hv = dynkin_halving(res, first_state_indicator(2), {1, 1.0, 0}, {2, 0.5, 0},
                                 0.02, 200000, base);
  EXPECT_TRUE(hv.passes()) << hv.coarse.residual << " " << hv.fine.residual;
  EXPECT_NEAR(hv.coarse.generator, 1.0, 1e-12);
  EXPECT_GT(hv.coarse.standard_error, 0.0);
}

TEST(Dynkin, ThreadCountDoesNotChangeResult) {
  const MarkResolution res(catalog("weibull"));
  const PointStream base(3, 0, res.strip_height());
  const auto phi = product_state_indicator(2, 2);
  const auto a = dynkin_residual(res, phi, {1, 0.5, 0}, {1, 0.2, 0}, 0.05, 10000, base, 1);
  const auto b = dynkin_residual(res, phi, {1, 0.5, 0}, {1, 0.2, 0}, 0.05, 10000, base, 4);
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(a.standard_error, b.standard_error);
}

TEST(CoupledCsv, RowsFollowEvents) {
  const MarkResolution res(catalog("ctmc2"));
  PointStream s(4, 0, res.strip_height());
  const auto p = simulate_coupled(res, s, {1, 0.0, 0}, {2, 0.0, 0}, 2.0);
  std::ostringstream os;
  write_coupled_csv(os, p, {{"seed", "4"}});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# seed=4");
  std::getline(in, line);
  EXPECT_EQ(line, "time,component,state1,state2");
  std::getline(in, line);
  EXPECT_EQ(line, "0,init,1,2");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, p.events.size());
}

}  // namespace
}  // namespace smpsde
