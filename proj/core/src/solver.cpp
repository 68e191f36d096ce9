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

#include "smpsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smpsde {

ExplosionSuspected::ExplosionSuspected(const std::string& model_name)
    : std::runtime_error("jump-count circuit breaker tripped for model '" + model_name +
                         "'; the rate field is likely unbounded or invalid") {}

std::vector<Sojourn> Trajectory::sojourns() const {
  std::vector<Sojourn> out;
  out.reserve(jumps.size() + 1);
  for (std::size_t n = 0; n <= jumps.size(); ++n) {
    Sojourn s;
    s.state = state_after(n);
    s.count = initial.count + static_cast<Count>(n);
    s.entry_age = n == 0 ? initial.age : 0.0;
    s.start = jump_time(n);
    s.fresh = n > 0 || initial.age == 0.0;
    if (n < jumps.size()) {
      s.duration = jumps[n].time - s.start;
      s.next = jumps[n].state;
    } else {
      if (!jumps.empty() && horizon == jumps.back().time) break;
      s.duration = horizon - s.start;
    }
    out.push_back(s);
  }
  return out;
}

namespace detail {

void check_simulation_inputs(const MarkResolution& resolution, const PointStream& stream,
                             const InitialCondition& initial, double horizon,
                             const SolverOptions& opts) {
  if (initial.state < 1 || initial.state > resolution.num_states()) {
    throw std::invalid_argument("initial state out of range");
  }
  if (!(initial.age >= 0.0) || !std::isfinite(initial.age)) {
    throw std::invalid_argument("initial age must be finite and nonnegative");
  }
  if (initial.count < 0) throw std::invalid_argument("initial count must be nonnegative");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (std::isinf(horizon) && !opts.stop_after) {
    throw std::invalid_argument("an infinite horizon needs stop_after");
  }
  if (stream.strip_height() < resolution.strip_height()) {
    throw std::invalid_argument("point stream is shorter than the mark layout");
  }
}

}  // namespace detail

Trajectory simulate_path(const MarkResolution& resolution, PointStream& stream,
                         const InitialCondition& initial, double horizon,
                         const SolverOptions& opts) {
  detail::check_simulation_inputs(resolution, stream, initial, horizon, opts);
  Trajectory traj{initial, {}, horizon};
  State state = initial.state;
  double last_jump = -initial.age;
  Count count = initial.count;
  for (;;) {
    const Point p = stream.next_point();
    if (p.time > horizon) break;
    const auto target = resolution.resolve_mark(state, p.time - last_jump, count, p.mark);
    if (!target) continue;
    traj.jumps.push_back({p.time, *target});
    state = *target;
    last_jump = p.time;
    ++count;
    if (opts.stop_after && traj.jumps.size() >= *opts.stop_after) {
      traj.horizon = p.time;
      break;
    }
    if (traj.jumps.size() > opts.max_jumps) {
      throw ExplosionSuspected(resolution.model().name());
    }
  }
  return traj;
}

AugmentedState state_at(const Trajectory& traj, double t) {
  if (!(t >= 0.0) || t > traj.horizon) {
    throw std::out_of_range("state_at: time outside [0, horizon]");
  }
  const auto it = std::upper_bound(traj.jumps.begin(), traj.jumps.end(), t,
                                   [](double u, const Jump& j) { return u < j.time; });
  const auto n = static_cast<std::size_t>(it - traj.jumps.begin());
  return {traj.state_after(n), t - traj.jump_time(n),
          traj.initial.count + static_cast<Count>(n)};
}

std::vector<double> holding_time_samples(const MarkResolution& resolution, State i, Count n,
                                         std::size_t num_samples, PointStream& stream) {
  if (num_samples < 1) throw std::invalid_argument("num_samples must be >= 1");
  if (i < 1 || i > resolution.num_states()) throw std::invalid_argument("state out of range");
  if (stream.strip_height() < resolution.row_extent(i)) {
    throw std::invalid_argument("point stream is shorter than the mark layout");
  }
  if (resolution.model().row_bound(i) <= 0.0) {
    throw std::invalid_argument("state has no exits; holding time is infinite");
  }
  std::vector<double> out;
  out.reserve(num_samples);
  while (out.size() < num_samples) {
    const double entered = stream.cursor();
    for (;;) {
      const Point p = stream.next_point();
      const double y = p.time - entered;
      if (resolution.resolve_mark(i, y, n, p.mark)) {
        out.push_back(y);
        break;
      }
    }
  }
  return out;
}

}  // namespace smpsde
