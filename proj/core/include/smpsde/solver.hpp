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

// Path-by-path construction of (X, Y, N) from a point stream: scan points in
// time order, resolve each mark against the current state's intervals at the
// current age and count, and jump (age to 0, count + 1) on acceptance.
// Rejected points leave the path untouched.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smpsde/layout.hpp"
#include "smpsde/prm.hpp"
#include "smpsde/rates.hpp"

namespace smpsde {

/// z = (state, age, count). The count is the value of n that rates read.
struct AugmentedState {
  State state = 1;
  double age = 0.0;
  Count count = 0;

  friend bool operator==(const AugmentedState&, const AugmentedState&) = default;
};

using InitialCondition = AugmentedState;

struct Jump {
  double time = 0.0;
  State state = 0;

  friend bool operator==(const Jump&, const Jump&) = default;
};

/// One holding period. The first sojourn of a path with positive initial age
/// is not `fresh`: it was already `entry_age` old at time 0.
struct Sojourn {
  State state = 0;
  Count count = 0;
  double entry_age = 0.0;
  double start = 0.0;     // T_n (T_0 = -initial age)
  double duration = 0.0;  // T_{n+1} - T_n, or time to horizon when censored
  std::optional<State> next;
  bool fresh = true;

  bool censored() const { return !next.has_value(); }
};

struct Trajectory {
  InitialCondition initial;
  std::vector<Jump> jumps;  // T_1 < T_2 < ...
  double horizon = 0.0;     // path is determined on [0, horizon]

  /// T_n with T_0 = -initial.age.
  double jump_time(std::size_t n) const {
    return n == 0 ? -initial.age : jumps[n - 1].time;
  }
  /// X_{T_n}.
  State state_after(std::size_t n) const {
    return n == 0 ? initial.state : jumps[n - 1].state;
  }
  /// All holding periods, the last one censored at the horizon unless the
  /// path was stopped exactly at a jump.
  std::vector<Sojourn> sojourns() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

class ExplosionSuspected : public std::runtime_error {
 public:
  explicit ExplosionSuspected(const std::string& model_name);
};

struct SolverOptions {
  /// Circuit breaker; exceeding it signals a model that slipped past validation.
  std::uint64_t max_jumps = 10'000'000;
  /// Stop right after this many jumps; the horizon then shrinks to the last
  /// jump time. Allows an infinite horizon.
  std::optional<std::uint64_t> stop_after;
};

Trajectory simulate_path(const MarkResolution& resolution, PointStream& stream,
                         const InitialCondition& initial, double horizon,
                         const SolverOptions& opts = {});

/// Right-continuous (X_t, Y_t, N_t). Throws std::out_of_range outside
/// [0, horizon].
AugmentedState state_at(const Trajectory& traj, double t);

/// Sojourns drawn one after another from `stream`, each starting fresh in
/// state i at age 0 with count n.
std::vector<double> holding_time_samples(const MarkResolution& resolution, State i, Count n,
                                         std::size_t num_samples, PointStream& stream);

namespace detail {
void check_simulation_inputs(const MarkResolution& resolution, const PointStream& stream,
                             const InitialCondition& initial, double horizon,
                             const SolverOptions& opts);
}

}  // namespace smpsde
