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

// Direct sampler of the same semi-Markov law that never touches a point
// stream: holding times by inverse transform of F(. | i, n), solved by
// bisection on the cumulative exit rate, then the next state from p(y, n).

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "smpsde/prm.hpp"
#include "smpsde/rates.hpp"
#include "smpsde/solver.hpp"

namespace smpsde {

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  double tolerance = 1e-10;  // bisection stops once the bracket is this narrow
  double max_age = 1e6;      // bracket growth cap
  QuadratureOptions quadrature;
};

/// Key used by oracle generators for `seed`; never equal to the seed itself,
/// so oracle and point-stream draws come from unrelated Philox keys.
std::uint64_t oracle_key(std::uint64_t seed);

class OracleSampler {
 public:
  OracleSampler(RateModel model, std::uint64_t seed, std::uint64_t stream_id = 0,
                OracleOptions opts = {});

  const RateModel& model() const { return model_; }

  /// The holding time s with P(S <= s) = u for a sojourn in state i at count
  /// n that is already `entry_age` old.
  double invert_holding_cdf(State i, Count n, double u, double entry_age = 0.0) const;

  double sample_sojourn(State i, Count n, double entry_age = 0.0);

  struct NextState {
    State state = 0;
    bool degenerate = false;  // zero exit rate at the sampled age; state == i
  };
  NextState sample_next_state(State i, double y, Count n);

  Trajectory simulate_path(const InitialCondition& initial, double horizon,
                           const SolverOptions& opts = {});

  std::uint64_t degenerate_events() const { return degenerate_events_; }

 private:
  RateModel model_;
  CounterRng rng_;
  OracleOptions opts_;
  std::uint64_t degenerate_events_ = 0;
};

}  // namespace smpsde
