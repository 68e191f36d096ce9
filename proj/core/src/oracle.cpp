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

#include "smpsde/oracle.hpp"

#include <cmath>
#include <sstream>

namespace smpsde {

std::uint64_t oracle_key(std::uint64_t seed) { return mix64(seed ^ 0x6f7261636c65ULL); }

OracleSampler::OracleSampler(RateModel model, std::uint64_t seed, std::uint64_t stream_id,
                             OracleOptions opts)
    : model_(std::move(model)), rng_(oracle_key(seed), stream_id), opts_(opts) {}

double OracleSampler::invert_holding_cdf(State i, Count n, double u, double entry_age) const {
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("u must lie in [0, 1)");
  const double target = -std::log1p(-u);
  if (target == 0.0) return 0.0;
  auto integral = [&](double a, double b) {
    return integrate_exit_rate(model_, i, entry_age + a, entry_age + b, n, opts_.quadrature);
  };
  // Grow [lo, hi] until the cumulative rate over it passes the target.
  double lo = 0.0, g_lo = 0.0;
  double hi = 1.0, g_hi = integral(0.0, hi);
  while (g_hi < target) {
    if (hi >= opts_.max_age) {
      std::ostringstream os;
      os << "no holding-time bracket below age " << opts_.max_age << " for state " << i
         << " at count " << n << "; cumulative exit rate does not diverge";
      throw BracketError(os.str());
    }
    lo = hi;
    g_lo = g_hi;
    g_hi += integral(hi, 2.0 * hi);
    hi *= 2.0;
  }
  while (hi - lo > opts_.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double g_mid = g_lo + integral(lo, mid);
    if (g_mid < target) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double OracleSampler::sample_sojourn(State i, Count n, double entry_age) {
  return invert_holding_cdf(i, n, rng_.uniform(), entry_age);
}

OracleSampler::NextState OracleSampler::sample_next_state(State i, double y, Count n) {
  const auto p = embedded_probs(model_, i, y, n);
  const double u = rng_.uniform();
  if (p[static_cast<std::size_t>(i - 1)] == 1.0) {
    ++degenerate_events_;
    return {i, true};
  }
  double acc = 0.0;
  State last = i;
  for (State j = 1; j <= model_.num_states(); ++j) {
    const double pj = p[static_cast<std::size_t>(j - 1)];
    if (j == i || pj <= 0.0) continue;
    acc += pj;
    last = j;
    if (u < acc) return {j, false};
  }
  return {last, false};
}

Trajectory OracleSampler::simulate_path(const InitialCondition& initial, double horizon,
                                        const SolverOptions& opts) {
  if (initial.state < 1 || initial.state > model_.num_states()) {
    throw std::invalid_argument("initial state out of range");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (std::isinf(horizon) && !opts.stop_after) {
    throw std::invalid_argument("an infinite horizon needs stop_after");
  }
  Trajectory traj{initial, {}, horizon};
  State state = initial.state;
  double entry_age = initial.age;
  double clock = 0.0;  // time at which the current sojourn was observed from
  Count count = initial.count;
  for (;;) {
    if (model_.row_bound(state) <= 0.0) break;
    const double remaining = sample_sojourn(state, count, entry_age);
    const double t = clock + remaining;
    if (t > horizon) break;
    const auto next = sample_next_state(state, entry_age + remaining, count);
    if (next.degenerate) {
      // Zero exit rate at the drawn age: no transition, keep ageing.
      entry_age += remaining;
      clock = t;
      continue;
    }
    traj.jumps.push_back({t, next.state});
    state = next.state;
    clock = t;
    entry_age = 0.0;
    ++count;
    if (opts.stop_after && traj.jumps.size() >= *opts.stop_after) {
      traj.horizon = t;
      break;
    }
    if (traj.jumps.size() > opts.max_jumps) throw ExplosionSuspected(model_.name());
  }
  return traj;
}

}  // namespace smpsde
