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

// Two solutions driven by one point stream. Every point is offered to both
// components, each resolving the mark against its own (state, age, count).
// With the fixed-offset layout, same-state components share the common part
// of each interval, so a single point can move both to the same target.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "smpsde/layout.hpp"
#include "smpsde/prm.hpp"
#include "smpsde/solver.hpp"

namespace smpsde {

enum class Mover { first, second, both };

const char* to_string(Mover m);

struct CoupledEvent {
  double time = 0.0;
  Mover mover = Mover::first;
  State state1 = 0;  // states after the event
  State state2 = 0;

  friend bool operator==(const CoupledEvent&, const CoupledEvent&) = default;
};

struct CoupledPath {
  Trajectory first;
  Trajectory second;
  std::vector<CoupledEvent> events;
  /// First time both components occupy the same state.
  std::optional<double> meeting_time;
  /// First time states and ages agree (and counts too when rates read the
  /// count); from then on the components coincide.
  std::optional<double> merge_time;

  std::size_t simultaneous_jumps() const;
};

CoupledPath simulate_coupled(const MarkResolution& resolution, PointStream& stream,
                             const InitialCondition& init1, const InitialCondition& init2,
                             double horizon, const SolverOptions& opts = {});

/// phi(z1, z2), bounded and C^1 in the two ages. Missing age derivatives are
/// replaced by finite differences with step `fd_step` (one-sided near age 0).
struct TestFunction {
  using Fn = std::function<double(const AugmentedState&, const AugmentedState&)>;
  Fn value;
  Fn d_age1;
  Fn d_age2;
  double fd_step = 1e-6;

  double operator()(const AugmentedState& z1, const AugmentedState& z2) const {
    return value(z1, z2);
  }
  double derivative_age1(const AugmentedState& z1, const AugmentedState& z2) const;
  double derivative_age2(const AugmentedState& z1, const AugmentedState& z2) const;
};

TestFunction constant_function(double c);
/// 1{x1 = target}.
TestFunction first_state_indicator(State target);
/// 1{x1 = target1} 1{x2 = target2}.
TestFunction product_state_indicator(State target1, State target2);

/// One jump channel of the coupled generator: `mover` jumps to `target` at
/// rate `coefficient`.
struct GeneratorTerm {
  Mover mover = Mover::first;
  State target = 0;
  double coefficient = 0.0;
};

/// Jump channels with their rates: (l1 - d l2)^+ for the first component
/// alone, (l2 - d l1)^+ for the second alone, and d min(l1, l2) for both,
/// where d = 1 when the states agree.
std::vector<GeneratorTerm> generator_terms(const RateModel& model, const AugmentedState& z1,
                                           const AugmentedState& z2);

/// (A phi)(z1, z2) for the coupled pair.
double generator_apply(const RateModel& model, const TestFunction& phi,
                       const AugmentedState& z1, const AugmentedState& z2);

struct DynkinEstimate {
  double h = 0.0;
  std::uint64_t reps = 0;
  double mean_increment = 0.0;  // mean of (phi(Z_h) - phi(z0)) / h
  double generator = 0.0;
  double residual = 0.0;  // mean_increment - generator
  double standard_error = 0.0;
};

/// Monte Carlo estimate of (E phi(Z_h) - phi(z0)) / h - (A phi)(z0). Rep r
/// reads base.child(r).
DynkinEstimate dynkin_residual(const MarkResolution& resolution, const TestFunction& phi,
                               const AugmentedState& z1, const AugmentedState& z2, double h,
                               std::uint64_t reps, const PointStream& base,
                               unsigned threads = 1);

/// Residuals at h and h/2 read off the same coupled paths.
struct DynkinHalving {
  DynkinEstimate coarse;  // step h
  DynkinEstimate fine;    // step h / 2
  /// |r(h) - r(h/2)| / (h/2): the first-order bias coefficient.
  double slope = 0.0;
  double slope_standard_error = 0.0;
  /// r(h) - 2 r(h/2), zero up to O(h^2) when the bias is linear in h.
  double trend = 0.0;
  double trend_standard_error = 0.0;

  /// Bias allowed at `step`: the slope, raised by 3 of its own standard
  /// errors since it is itself estimated, times the step.
  double bias_allowance(double step) const {
    return (slope + 3.0 * slope_standard_error) * step;
  }
  /// |r| <= 3 s.e. + bias_allowance(step) at both steps, and
  /// |trend| <= 3 s.e.
  bool passes() const;
};

DynkinHalving dynkin_halving(const MarkResolution& resolution, const TestFunction& phi,
                             const AugmentedState& z1, const AugmentedState& z2, double h,
                             std::uint64_t reps, const PointStream& base,
                             unsigned threads = 1);

struct MeetingSummary {
  std::size_t paths = 0;
  std::size_t met = 0;
  std::size_t merged = 0;
  std::size_t merged_at_start = 0;
  std::size_t merged_at_first_event = 0;
  std::uint64_t events = 0;
  std::uint64_t simultaneous_jumps = 0;
  /// Events after the merge time that moved only one component.
  std::uint64_t permanence_violations = 0;
  std::optional<double> mean_meeting_time;
  std::optional<double> median_meeting_time;
  std::optional<double> mean_merge_time;
  std::optional<double> median_merge_time;
};

MeetingSummary meeting_stats(std::span<const CoupledPath> paths);
nlohmann::json to_json(const MeetingSummary& s);

}  // namespace smpsde
