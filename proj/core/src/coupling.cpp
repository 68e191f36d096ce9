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

#include "smpsde/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "smpsde/parallel.hpp"
#include "smpsde/stats.hpp"

namespace smpsde {

const char* to_string(Mover m) {
  switch (m) {
    case Mover::first:
      return "1";
    case Mover::second:
      return "2";
    case Mover::both:
      return "both";
  }
  return "?";
}

std::size_t CoupledPath::simultaneous_jumps() const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const CoupledEvent& e) { return e.mover == Mover::both; }));
}

namespace {

struct Component {
  State state;
  double last_jump;
  Count count;

  explicit Component(const InitialCondition& z)
      : state(z.state), last_jump(-z.age), count(z.count) {}
};

bool coincide(const Component& a, const Component& b, bool n_dependent) {
  return a.state == b.state && a.last_jump == b.last_jump && (!n_dependent || a.count == b.count);
}

}  // namespace

CoupledPath simulate_coupled(const MarkResolution& resolution, PointStream& stream,
                             const InitialCondition& init1, const InitialCondition& init2,
                             double horizon, const SolverOptions& opts) {
  SolverOptions checked = opts;
  checked.stop_after.reset();
  detail::check_simulation_inputs(resolution, stream, init1, horizon, checked);
  detail::check_simulation_inputs(resolution, stream, init2, horizon, checked);
  const bool n_dep = resolution.model().n_dependent();

  CoupledPath cp;
  cp.first = Trajectory{init1, {}, horizon};
  cp.second = Trajectory{init2, {}, horizon};
  Component c1(init1), c2(init2);
  if (c1.state == c2.state) cp.meeting_time = 0.0;
  if (coincide(c1, c2, n_dep)) cp.merge_time = 0.0;

  for (;;) {
    const Point p = stream.next_point();
    if (p.time > horizon) break;
    const auto j1 = resolution.resolve_mark(c1.state, p.time - c1.last_jump, c1.count, p.mark);
    const auto j2 = resolution.resolve_mark(c2.state, p.time - c2.last_jump, c2.count, p.mark);
    if (!j1 && !j2) continue;
    if (j1) {
      cp.first.jumps.push_back({p.time, *j1});
      c1 = Component({*j1, 0.0, c1.count + 1});
      c1.last_jump = p.time;
    }
    if (j2) {
      cp.second.jumps.push_back({p.time, *j2});
      c2 = Component({*j2, 0.0, c2.count + 1});
      c2.last_jump = p.time;
    }
    const Mover who = j1 && j2 ? Mover::both : (j1 ? Mover::first : Mover::second);
    cp.events.push_back({p.time, who, c1.state, c2.state});
    if (!cp.meeting_time && c1.state == c2.state) cp.meeting_time = p.time;
    if (!cp.merge_time && coincide(c1, c2, n_dep)) cp.merge_time = p.time;
    if (cp.events.size() > opts.max_jumps) {
      throw ExplosionSuspected(resolution.model().name());
    }
  }
  return cp;
}

double TestFunction::derivative_age1(const AugmentedState& z1, const AugmentedState& z2) const {
  if (d_age1) return d_age1(z1, z2);
  auto at = [&](double y) { return value({z1.state, y, z1.count}, z2); };
  const double h = fd_step;
  if (z1.age >= h) return (at(z1.age + h) - at(z1.age - h)) / (2.0 * h);
  return (-3.0 * at(z1.age) + 4.0 * at(z1.age + h) - at(z1.age + 2.0 * h)) / (2.0 * h);
}

double TestFunction::derivative_age2(const AugmentedState& z1, const AugmentedState& z2) const {
  if (d_age2) return d_age2(z1, z2);
  auto at = [&](double y) { return value(z1, {z2.state, y, z2.count}); };
  const double h = fd_step;
  if (z2.age >= h) return (at(z2.age + h) - at(z2.age - h)) / (2.0 * h);
  return (-3.0 * at(z2.age) + 4.0 * at(z2.age + h) - at(z2.age + 2.0 * h)) / (2.0 * h);
}

TestFunction constant_function(double c) {
  auto zero = [](const AugmentedState&, const AugmentedState&) { return 0.0; };
  return {[c](const AugmentedState&, const AugmentedState&) { return c; }, zero, zero};
}

TestFunction first_state_indicator(State target) {
  auto zero = [](const AugmentedState&, const AugmentedState&) { return 0.0; };
  return {[target](const AugmentedState& z1, const AugmentedState&) {
            return z1.state == target ? 1.0 : 0.0;
          },
          zero, zero};
}

TestFunction product_state_indicator(State target1, State target2) {
  auto zero = [](const AugmentedState&, const AugmentedState&) { return 0.0; };
  return {[target1, target2](const AugmentedState& z1, const AugmentedState& z2) {
            return z1.state == target1 && z2.state == target2 ? 1.0 : 0.0;
          },
          zero, zero};
}

std::vector<GeneratorTerm> generator_terms(const RateModel& model, const AugmentedState& z1,
                                           const AugmentedState& z2) {
  const int k = model.num_states();
  const bool same = z1.state == z2.state;
  std::vector<GeneratorTerm> terms;
  for (State j = 1; j <= k; ++j) {
    if (j == z1.state) continue;
    const double own = model.rate(z1.state, j, z1.age, z1.count);
    const double other = same ? model.rate(z2.state, j, z2.age, z2.count) : 0.0;
    terms.push_back({Mover::first, j, std::max(0.0, own - other)});
  }
  for (State j = 1; j <= k; ++j) {
    if (j == z2.state) continue;
    const double own = model.rate(z2.state, j, z2.age, z2.count);
    const double other = same ? model.rate(z1.state, j, z1.age, z1.count) : 0.0;
    terms.push_back({Mover::second, j, std::max(0.0, own - other)});
  }
  if (same) {
    for (State j = 1; j <= k; ++j) {
      if (j == z1.state) continue;
      terms.push_back({Mover::both, j,
                       std::min(model.rate(z1.state, j, z1.age, z1.count),
                                model.rate(z2.state, j, z2.age, z2.count))});
    }
  }
  return terms;
}

double generator_apply(const RateModel& model, const TestFunction& phi,
                       const AugmentedState& z1, const AugmentedState& z2) {
  const double base = phi(z1, z2);
  double total = phi.derivative_age1(z1, z2) + phi.derivative_age2(z1, z2);
  for (const auto& t : generator_terms(model, z1, z2)) {
    if (t.coefficient == 0.0) continue;
    const AugmentedState jumped1{t.target, 0.0, z1.count + 1};
    const AugmentedState jumped2{t.target, 0.0, z2.count + 1};
    double after = base;
    switch (t.mover) {
      case Mover::first:
        after = phi(jumped1, z2);
        break;
      case Mover::second:
        after = phi(z1, jumped2);
        break;
      case Mover::both:
        after = phi(jumped1, jumped2);
        break;
    }
    total += t.coefficient * (after - base);
  }
  return total;
}

namespace {

struct Moments {
  double sum_x = 0.0, sum_xx = 0.0;
  double sum_y = 0.0, sum_yy = 0.0;
  double sum_d = 0.0, sum_dd = 0.0;
  double sum_e = 0.0, sum_ee = 0.0;

  void add(const Moments& o) {
    sum_x += o.sum_x;
    sum_xx += o.sum_xx;
    sum_y += o.sum_y;
    sum_yy += o.sum_yy;
    sum_d += o.sum_d;
    sum_dd += o.sum_dd;
    sum_e += o.sum_e;
    sum_ee += o.sum_ee;
  }
};

double standard_error(double sum, double sum_sq, double n) {
  if (n < 2) return 0.0;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return std::sqrt(var / n);
}

// Accumulates x = (phi(Z_h) - phi0)/h, y = (phi(Z_{h/2}) - phi0)/(h/2) and
// d = x - 2y and e = x - y over reps in fixed chunks, reduced in chunk order.
Moments dynkin_moments(const MarkResolution& resolution, const TestFunction& phi,
                       const AugmentedState& z1, const AugmentedState& z2, double h,
                       std::uint64_t reps, const PointStream& base, unsigned threads) {
  const double phi0 = phi(z1, z2);
  const Chunking chunks{static_cast<std::size_t>(reps), 4096};
  std::vector<Moments> partial(chunks.chunks());
  parallel_for(chunks.chunks(), threads, [&](std::size_t c) {
    Moments m;
    for (std::size_t r = chunks.begin(c); r < chunks.end(c); ++r) {
      PointStream stream = base.child(r);
      const CoupledPath path = simulate_coupled(resolution, stream, z1, z2, h);
      const double x = (phi(state_at(path.first, h), state_at(path.second, h)) - phi0) / h;
      const double y =
          (phi(state_at(path.first, 0.5 * h), state_at(path.second, 0.5 * h)) - phi0) /
          (0.5 * h);
      const double d = x - 2.0 * y;
      m.sum_x += x;
      m.sum_xx += x * x;
      m.sum_y += y;
      m.sum_yy += y * y;
      m.sum_d += d;
      m.sum_dd += d * d;
      m.sum_e += x - y;
      m.sum_ee += (x - y) * (x - y);
    }
    partial[c] = m;
  });
  Moments total;
  for (const auto& m : partial) total.add(m);
  return total;
}

void check_dynkin_args(double h, std::uint64_t reps) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
}

}  // namespace

DynkinHalving dynkin_halving(const MarkResolution& resolution, const TestFunction& phi,
                             const AugmentedState& z1, const AugmentedState& z2, double h,
                             std::uint64_t reps, const PointStream& base, unsigned threads) {
  check_dynkin_args(h, reps);
  const Moments m = dynkin_moments(resolution, phi, z1, z2, h, reps, base, threads);
  const double a = generator_apply(resolution.model(), phi, z1, z2);
  const auto n = static_cast<double>(reps);
  DynkinHalving out;
  out.coarse = {h, reps, m.sum_x / n, a, m.sum_x / n - a, standard_error(m.sum_x, m.sum_xx, n)};
  out.fine = {0.5 * h, reps, m.sum_y / n, a, m.sum_y / n - a,
              standard_error(m.sum_y, m.sum_yy, n)};
  out.slope = std::abs(m.sum_e / n) / (0.5 * h);
  out.slope_standard_error = standard_error(m.sum_e, m.sum_ee, n) / (0.5 * h);
  out.trend = out.coarse.residual - 2.0 * out.fine.residual;
  out.trend_standard_error = standard_error(m.sum_d, m.sum_dd, n);
  return out;
}

DynkinEstimate dynkin_residual(const MarkResolution& resolution, const TestFunction& phi,
                               const AugmentedState& z1, const AugmentedState& z2, double h,
                               std::uint64_t reps, const PointStream& base, unsigned threads) {
  return dynkin_halving(resolution, phi, z1, z2, h, reps, base, threads).coarse;
}

bool DynkinHalving::passes() const {
  auto within = [&](const DynkinEstimate& e) {
    return std::abs(e.residual) <= 3.0 * e.standard_error + bias_allowance(e.h);
  };
  return within(coarse) && within(fine) &&
         std::abs(trend) <= 3.0 * trend_standard_error;
}

MeetingSummary meeting_stats(std::span<const CoupledPath> paths) {
  if (paths.empty()) throw std::invalid_argument("meeting_stats needs at least one path");
  MeetingSummary s;
  s.paths = paths.size();
  std::vector<double> meets, merges;
  for (const auto& p : paths) {
    s.events += p.events.size();
    s.simultaneous_jumps += p.simultaneous_jumps();
    if (p.meeting_time) {
      ++s.met;
      meets.push_back(*p.meeting_time);
    }
    if (p.merge_time) {
      ++s.merged;
      merges.push_back(*p.merge_time);
      if (*p.merge_time == 0.0) {
        ++s.merged_at_start;
      } else if (!p.events.empty() && p.events.front().time == *p.merge_time) {
        ++s.merged_at_first_event;
      }
      for (const auto& e : p.events) {
        if (e.time > *p.merge_time && e.mover != Mover::both) ++s.permanence_violations;
      }
    }
  }
  if (!meets.empty()) {
    EmpiricalDistribution d(std::move(meets));
    s.mean_meeting_time = d.mean();
    s.median_meeting_time = d.quantile(0.5);
  }
  if (!merges.empty()) {
    EmpiricalDistribution d(std::move(merges));
    s.mean_merge_time = d.mean();
    s.median_merge_time = d.quantile(0.5);
  }
  return s;
}

nlohmann::json to_json(const MeetingSummary& s) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"paths", s.paths},
          {"met", s.met},
          {"merged", s.merged},
          {"merged_at_start", s.merged_at_start},
          {"merged_at_first_event", s.merged_at_first_event},
          {"events", s.events},
          {"simultaneous_jumps", s.simultaneous_jumps},
          {"permanence_violations", s.permanence_violations},
          {"mean_meeting_time", opt(s.mean_meeting_time)},
          {"median_meeting_time", opt(s.median_meeting_time)},
          {"mean_merge_time", opt(s.mean_merge_time)},
          {"median_merge_time", opt(s.median_merge_time)}};
}

}  // namespace smpsde
