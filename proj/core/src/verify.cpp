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

#include "smpsde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "smpsde/coupling.hpp"
#include "smpsde/layout.hpp"
#include "smpsde/oracle.hpp"
#include "smpsde/parallel.hpp"
#include "smpsde/prm.hpp"

namespace smpsde {

namespace {

constexpr double kLongHorizon = 1e6;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Added to 3-s.e. bands so cells with probability 0 or 1, where the
// binomial s.e. vanishes, tolerate quadrature error in the reference value.
constexpr double kQuadratureSlack = 1e-8;

std::uint64_t suite_stream(std::string_view tag) { return fnv1a64(tag); }

PointStream suite_base(const MarkResolution& res, const VerifyOptions& opts,
                       std::string_view tag) {
  return PointStream(opts.seed, suite_stream(tag), res.strip_height());
}

template <class Fn>
auto collect(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<decltype(fn(std::size_t{0}))> out(n);
  parallel_for(n, threads, [&](std::size_t r) { out[r] = fn(r); });
  return out;
}

std::vector<State> active_states(const RateModel& model) {
  std::vector<State> out;
  for (State i = 1; i <= model.num_states(); ++i) {
    if (model.row_bound(i) > 0.0) out.push_back(i);
  }
  return out;
}

std::vector<Count> tested_counts(const RateModel& model) {
  if (model.n_dependent()) return {0, 1};
  return {0};
}

template <class... Parts>
std::string cat(const Parts&... parts) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << parts);
  return os.str();
}

Verdict zero_count_verdict(std::string name, std::uint64_t count, std::uint64_t probes,
                           std::string what) {
  return {std::move(name), static_cast<double>(count), 0.0, count == 0,
          cat(count, " of ", probes, " probes violate ", what)};
}

Verdict ks_verdict(std::string name, const KsResult& ks, double alpha, std::string detail) {
  const double crit = ks.critical(alpha);
  return {std::move(name), ks.statistic, crit, ks.passes(alpha),
          cat(detail, "; n_eff=", ks.effective_n, ", alpha=", alpha)};
}

Jump first_jump(const Trajectory& t) {
  return t.jumps.empty() ? Jump{kInf, 0} : t.jumps.front();
}

}  // namespace

bool SuiteResult::passed() const {
  if (!skipped.empty()) return false;
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

nlohmann::json to_json(const SuiteResult& r) {
  nlohmann::json j{{"suite", r.suite}, {"passed", r.passed()}};
  if (!r.skipped.empty()) j["skipped"] = r.skipped;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "validation",     "layout",      "identity", "instantaneous_rate",
      "holding",        "kernel",      "embedded_chain", "semi_markov",
      "oracle",         "explosion",   "coupling", "generator"};
  return names;
}

SuiteResult check_validation(const ModelSpec& spec, const VerifyOptions& opts) {
  const auto report = validate(spec.model, opts.validation);
  std::ostringstream detail;
  detail << report.violations.size() << " violations; c=" << report.bound;
  const std::size_t shown = std::min<std::size_t>(report.violations.size(), 5);
  for (std::size_t k = 0; k < shown; ++k) {
    const auto& v = report.violations[k];
    detail << "; " << v.assumption << " (" << v.from << "," << v.to << ") y=" << v.age
           << " n=" << v.count << ": " << v.detail;
  }
  return {"validation",
          {{"validation.assumptions", static_cast<double>(report.violations.size()), 0.0,
            report.passed(), detail.str()}},
          {}};
}

SuiteResult check_layout(const ModelSpec& spec, const VerifyOptions& opts) {
  const MarkResolution res(spec.model);
  const int k = spec.model.num_states();
  CounterRng rng(opts.seed, suite_stream("layout"));
  auto draw_age = [&] { return rng.uniform() * opts.validation.y_check; };
  auto draw_count = [&] { return static_cast<Count>(rng.next_u64() % 11); };

  std::uint64_t disjoint = 0, length = 0, contained = 0, left_end = 0, overlap = 0,
                resolve = 0;
  for (std::size_t probe = 0; probe < opts.layout_checks; ++probe) {
    const State i = static_cast<State>(1 + rng.next_u64() % static_cast<std::uint64_t>(k));
    const double y = draw_age(), y2 = draw_age();
    const Count n = draw_count(), n2 = draw_count();
    const double lo = res.row_start(i), hi = res.row_extent(i);

    std::vector<std::pair<State, Interval>> live;
    bool bad_length = false, bad_contained = false, bad_left = false, bad_overlap = false;
    const auto overlaps = res.overlap_lengths(i, y, n, y2, n2);
    for (State j = 1; j <= k; ++j) {
      if (j == i) continue;
      const Interval a = res.interval_of(i, j, y, n);
      const Interval b = res.interval_of(i, j, y2, n2);
      const double rate = spec.model.rate(i, j, y, n);
      const double tol = 1e-12 * (1.0 + std::abs(a.upper));
      if (std::abs(a.length() - rate) > tol) bad_length = true;
      if (!a.empty()) {
        live.emplace_back(j, a);
        if (a.lower < lo || a.upper > hi) bad_contained = true;
      }
      if (a.lower != b.lower) bad_left = true;
      const double both = std::max(0.0, std::min(a.upper, b.upper) - std::max(a.lower, b.lower));
      for (const auto& o : overlaps) {
        if (o.target != j) continue;
        if (std::abs(o.both - both) > tol ||
            std::abs(o.only_first - (a.length() - both)) > tol ||
            std::abs(o.only_second - (b.length() - both)) > tol) {
          bad_overlap = true;
        }
      }
    }
    bool bad_disjoint = false;
    for (std::size_t p = 0; p < live.size(); ++p) {
      for (std::size_t q = p + 1; q < live.size(); ++q) {
        const Interval& a = live[p].second;
        const Interval& b = live[q].second;
        if (a.lower < b.upper && b.lower < a.upper) bad_disjoint = true;
      }
    }
    // Brute-force scan of one mark in the row and one just outside it.
    const double v = lo + rng.uniform() * (hi - lo);
    std::optional<State> expect;
    for (const auto& [j, iv] : live) {
      if (iv.contains(v)) expect = j;
    }
    const bool bad_resolve = (hi > lo && res.resolve_mark(i, y, n, v) != expect) ||
                             res.resolve_mark(i, y, n, hi).has_value();
    disjoint += bad_disjoint;
    length += bad_length;
    contained += bad_contained;
    left_end += bad_left;
    overlap += bad_overlap;
    resolve += bad_resolve;
  }
  const auto probes = static_cast<std::uint64_t>(opts.layout_checks);
  return {"layout",
          {zero_count_verdict("layout.disjoint", disjoint, probes, "disjointness"),
           zero_count_verdict("layout.length", length, probes, "length = rate"),
           zero_count_verdict("layout.containment", contained, probes, "containment in the row"),
           zero_count_verdict("layout.common_left_end", left_end, probes,
                              "fixed left end across (y, n)"),
           zero_count_verdict("layout.overlap", overlap, probes, "overlap lengths"),
           zero_count_verdict("layout.resolve", resolve, probes, "mark resolution")},
          {}};
}

SuiteResult check_identity(const ModelSpec& spec, const VerifyOptions& opts) {
  const RateModel& m = spec.model;
  const std::vector<Count> counts =
      m.n_dependent() ? opts.validation.counts : std::vector<Count>{0};
  const int g = std::max(2, opts.identity_grid);
  double worst = 0.0;
  std::string where = "none";
  std::uint64_t evaluations = 0;
  for (State i = 1; i <= m.num_states(); ++i) {
    for (State j = 1; j <= m.num_states(); ++j) {
      for (Count n : counts) {
        for (int q = 0; q < g; ++q) {
          const double y = opts.validation.y_check * q / (g - 1);
          const double r = std::abs(rate_identity_residual(m, i, j, y, n));
          ++evaluations;
          if (!(r <= worst)) {
            worst = std::isnan(r) ? kInf : r;
            where = cat("(", i, ",", j, ") y=", y, " n=", n);
          }
        }
      }
    }
  }
  return {"identity",
          {{"identity.max_residual", worst, 1e-9, worst < 1e-9,
            cat(evaluations, " grid points; worst at ", where)}},
          {}};
}

SuiteResult check_instantaneous_rate(const ModelSpec& spec, const VerifyOptions& opts) {
  constexpr int kAges = 20;
  constexpr double kDelta = 1e-3;
  constexpr double kTolerance = 1e-4;
  const RateModel& m = spec.model;
  const auto breaks = m.age_breakpoints();
  auto near_break = [&](double y) {
    return std::any_of(breaks.begin(), breaks.end(),
                       [&](double b) { return std::abs(y - b) < 2.0 * kDelta; });
  };
  double worst = 0.0;
  std::string where = "none";
  for (State i : active_states(m)) {
    for (Count n : tested_counts(m)) {
      // Stay where the survival is at least 1%, so the division by 1 - F
      // does not amplify quadrature error.
      const double cutoff = std::log(100.0);
      double hi = opts.validation.y_check;
      if (gamma(m, i, hi, n) > cutoff) {
        double lo = 0.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (gamma(m, i, mid, n) > cutoff ? hi : lo) = mid;
        }
      }
      for (int q = 0; q < kAges; ++q) {
        double y = hi * (q + 0.5) / kAges;
        if (y <= kDelta) y = 2.0 * kDelta;
        if (near_break(y)) y += 4.0 * kDelta;
        const double survival = holding_survival(m, i, y, n);
        for (State j = 1; j <= m.num_states(); ++j) {
          if (j == i) continue;
          const double dq =
              (kernel(m, i, j, y + kDelta, n) - kernel(m, i, j, y - kDelta, n)) / (2.0 * kDelta);
          const double err = std::abs(dq / survival - m.rate(i, j, y, n));
          if (!(err <= worst)) {
            worst = std::isnan(err) ? kInf : err;
            where = cat("(", i, ",", j, ") y=", y, " n=", n);
          }
        }
      }
    }
  }
  return {"instantaneous_rate",
          {{"instantaneous_rate.max_error", worst, kTolerance, worst <= kTolerance,
            cat("central differences of Q with step ", kDelta, "; worst at ", where)}},
          {}};
}

SuiteResult check_holding(const ModelSpec& spec, const VerifyOptions& opts) {
  const RateModel& m = spec.model;
  const MarkResolution res(m);
  const auto states = opts.holding_states.empty() ? active_states(m) : opts.holding_states;
  const auto counts = tested_counts(m);
  const double alpha = opts.alpha / static_cast<double>(states.size() * counts.size());
  const PointStream base = suite_base(res, opts, "holding");

  struct Case {
    State i;
    Count n;
  };
  std::vector<Case> cases;
  for (State i : states) {
    for (Count n : counts) cases.push_back({i, n});
  }
  auto results = collect(cases.size(), opts.threads, [&](std::size_t c) {
    const auto [i, n] = cases[c];
    PointStream stream = base.child(static_cast<std::uint64_t>(i)).child(n);
    const auto sample = holding_time_samples(res, i, n, opts.samples, stream);
    if (spec.closed_form_gamma) {
      const auto& g = *spec.closed_form_gamma;
      return ks_one_sample(sample, [&](double y) { return -std::expm1(-g(i, y, n)); });
    }
    return ks_one_sample(sample, [&](double y) { return holding_cdf(m, i, y, n); });
  });
  SuiteResult out{"holding", {}, {}};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    out.verdicts.push_back(ks_verdict(
        cat("holding.state", cases[c].i, ".n", cases[c].n), results[c], alpha,
        cat("KS of ", opts.samples, " sojourns against ",
            spec.closed_form_gamma ? "closed-form" : "quadrature", " cdf")));
  }
  return out;
}

std::vector<Verdict> kernel_law_verdicts(const RateModel& model, State i, Count n,
                                         const std::vector<Jump>& first_jumps,
                                         const std::vector<double>& ages,
                                         const std::string& label) {
  const auto total = static_cast<double>(first_jumps.size());
  std::vector<Verdict> out;
  for (double y : ages) {
    for (State j = 1; j <= model.num_states(); ++j) {
      if (j == i) continue;
      const auto hits = std::count_if(first_jumps.begin(), first_jumps.end(),
                                      [&](const Jump& jp) { return jp.state == j && jp.time <= y; });
      const double p_hat = static_cast<double>(hits) / total;
      const double q = kernel(model, i, j, y, n);
      const double se = binomial_standard_error(q, total);
      const double dev = std::abs(p_hat - q);
      const double band = 3.0 * se + kQuadratureSlack;
      out.push_back({cat(label, ".to", j, ".y", y), dev, band, dev <= band,
                     cat("empirical ", p_hat, " vs Q=", q, " over ", first_jumps.size(),
                         " paths")});
    }
  }
  return out;
}

SuiteResult check_kernel(const ModelSpec& spec, const VerifyOptions& opts) {
  if (opts.kernel_ages.empty()) throw std::invalid_argument("kernel suite needs ages");
  const MarkResolution res(spec.model);
  const PointStream base = suite_base(res, opts, "kernel");
  const double horizon = *std::max_element(opts.kernel_ages.begin(), opts.kernel_ages.end());
  SolverOptions so;
  so.stop_after = 1;
  SuiteResult out{"kernel", {}, {}};
  for (State i : active_states(spec.model)) {
    const PointStream row = base.child(static_cast<std::uint64_t>(i));
    const auto firsts = collect(opts.samples, opts.threads, [&](std::size_t r) {
      PointStream s = row.child(r);
      return first_jump(simulate_path(res, s, {i, 0.0, 0}, horizon, so));
    });
    auto v = kernel_law_verdicts(spec.model, i, 0, firsts, opts.kernel_ages,
                                 cat("kernel.state", i));
    out.verdicts.insert(out.verdicts.end(), v.begin(), v.end());
  }
  return out;
}

SuiteResult check_embedded_chain(const ModelSpec& spec, const VerifyOptions& opts) {
  const RateModel& m = spec.model;
  const MarkResolution res(m);
  const PointStream base = suite_base(res, opts, "embedded_chain");
  SolverOptions so;
  so.stop_after = 1;
  SuiteResult out{"embedded_chain", {}, {}};
  for (State i : active_states(m)) {
    for (Count n : tested_counts(m)) {
      const PointStream sub = base.child(static_cast<std::uint64_t>(i)).child(n);
      const auto firsts = collect(opts.samples, opts.threads, [&](std::size_t r) {
        PointStream s = sub.child(r);
        return first_jump(simulate_path(res, s, {i, 0.0, n}, kLongHorizon, so));
      });
      const auto probs = jump_distribution(m, i, n);
      const auto total = static_cast<double>(firsts.size());
      for (State j = 1; j <= m.num_states(); ++j) {
        if (j == i) continue;
        const auto hits = std::count_if(firsts.begin(), firsts.end(),
                                        [&](const Jump& jp) { return jp.state == j; });
        const double p_hat = static_cast<double>(hits) / total;
        const double p = probs[static_cast<std::size_t>(j - 1)];
        const double se = binomial_standard_error(p, total);
        const double dev = std::abs(p_hat - p);
        const double band = 3.0 * se + kQuadratureSlack;
        out.verdicts.push_back({cat("embedded_chain.state", i, ".n", n, ".to", j), dev, band,
                                dev <= band,
                                cat("frequency ", p_hat, " vs ", p, " over ", firsts.size(),
                                    " first jumps")});
      }
    }
  }
  return out;
}

namespace {

// First two sojourns of a path started fresh in `start`.
struct TwoJumps {
  State start = 0;
  double t1 = kInf;
  State x1 = 0;
  double gap = kInf;  // T2 - T1
  State x2 = 0;
};

TwoJumps two_jumps(State start, const Trajectory& t) {
  TwoJumps o;
  o.start = start;
  if (!t.jumps.empty()) {
    o.t1 = t.jumps[0].time;
    o.x1 = t.jumps[0].state;
  }
  if (t.jumps.size() > 1) {
    o.gap = t.jumps[1].time - t.jumps[0].time;
    o.x2 = t.jumps[1].state;
  }
  return o;
}

}  // namespace

SuiteResult check_semi_markov(const ModelSpec& spec, const VerifyOptions& opts) {
  constexpr double kFamilyAlpha = 0.05;
  const RateModel& m = spec.model;
  const int k = m.num_states();
  const MarkResolution res(m);
  const auto states = active_states(m);
  const PointStream base = suite_base(res, opts, "semi_markov");
  SolverOptions so;
  so.stop_after = 2;
  const auto paths = collect(opts.samples, opts.threads, [&](std::size_t r) {
    PointStream s = base.child(r);
    const State x0 = states[r % states.size()];
    return two_jumps(x0, simulate_path(res, s, {x0, 0.0, 0}, kLongHorizon, so));
  });

  struct Test {
    State via;
    ChiSquareResult chi;
    std::size_t rows;
  };
  std::vector<Test> tests;
  for (State i = 1; i <= k; ++i) {
    std::vector<const TwoJumps*> group;
    for (const auto& p : paths) {
      if (p.x1 == i && std::isfinite(p.gap)) group.push_back(&p);
    }
    if (group.size() < kMinSampleSize) continue;
    // Strata: X_0 crossed with T1 below or above its median given X_0.
    std::map<State, double> median_t1;
    for (State x0 = 1; x0 <= k; ++x0) {
      std::vector<double> t1;
      for (const auto* p : group) {
        if (p->start == x0) t1.push_back(p->t1);
      }
      if (!t1.empty()) median_t1[x0] = EmpiricalDistribution(std::move(t1)).quantile(0.5);
    }
    std::vector<double> gaps;
    for (const auto* p : group) gaps.push_back(p->gap);
    const EmpiricalDistribution gd(std::move(gaps));
    const double q1 = gd.quantile(0.25), q2 = gd.quantile(0.5), q3 = gd.quantile(0.75);
    auto bin = [&](double g) { return g <= q1 ? 0 : g <= q2 ? 1 : g <= q3 ? 2 : 3; };

    std::map<std::pair<State, int>, std::vector<std::uint64_t>> rows;
    for (const auto* p : group) {
      auto& row = rows[{p->start, p->t1 <= median_t1[p->start] ? 0 : 1}];
      row.resize(static_cast<std::size_t>(k) * 4, 0);
      ++row[static_cast<std::size_t>(p->x2 - 1) * 4 + bin(p->gap)];
    }
    if (rows.size() < 2) continue;
    std::vector<std::vector<std::uint64_t>> table;
    for (auto& [key, row] : rows) table.push_back(std::move(row));
    tests.push_back({i, chi_square_homogeneity(table), table.size()});
  }
  SuiteResult out{"semi_markov", {}, {}};
  const double alpha = kFamilyAlpha / static_cast<double>(std::max<std::size_t>(1, tests.size()));
  for (const auto& t : tests) {
    out.verdicts.push_back({cat("semi_markov.via_state", t.via), t.chi.statistic,
                            t.chi.dof > 0 ? chi_square_critical(alpha, t.chi.dof) : 0.0,
                            t.chi.passes(alpha),
                            cat("homogeneity of (X_T2, binned T2 - T1) across ", t.rows,
                                " strata of (X_0, T1); dof=", t.chi.dof, ", p=", t.chi.p_value,
                                ", alpha=", alpha)});
  }
  if (tests.empty()) out.skipped = "no state reached with enough paths";
  return out;
}

SuiteResult check_oracle(const ModelSpec& spec, const VerifyOptions& opts) {
  const RateModel& m = spec.model;
  const MarkResolution res(m);
  const auto states = active_states(m);
  const PointStream base = suite_base(res, opts, "oracle");
  const std::uint64_t oracle_parent = suite_stream("oracle.direct");
  SolverOptions so;
  so.stop_after = 2;
  auto start_of = [&](std::size_t r) { return states[r % states.size()]; };

  const auto prm = collect(opts.samples, opts.threads, [&](std::size_t r) {
    PointStream s = base.child(r);
    return two_jumps(start_of(r), simulate_path(res, s, {start_of(r), 0.0, 0}, kLongHorizon, so));
  });
  const auto direct = collect(opts.samples, opts.threads, [&](std::size_t r) {
    OracleSampler sampler(m, opts.seed, derive_stream_id(oracle_parent, r));
    return two_jumps(start_of(r), sampler.simulate_path({start_of(r), 0.0, 0}, kLongHorizon, so));
  });

  struct Pending {
    std::string name;
    KsResult ks;
    std::string detail;
  };
  std::vector<Pending> ks_tests;
  std::vector<std::string> skipped_tests;
  auto add_ks = [&](const std::string& name, std::vector<double> a, std::vector<double> b,
                    const std::string& detail) {
    if (a.size() < kMinSampleSize || b.size() < kMinSampleSize) {
      skipped_tests.push_back(name);
      return;
    }
    ks_tests.push_back({name, ks_two_sample(a, b), detail});
  };
  for (State i : states) {
    std::vector<double> a, b;
    for (const auto& p : prm) {
      if (p.start == i && std::isfinite(p.t1)) a.push_back(p.t1);
    }
    for (const auto& p : direct) {
      if (p.start == i && std::isfinite(p.t1)) b.push_back(p.t1);
    }
    add_ks(cat("oracle.T1.state", i), std::move(a), std::move(b), "two-sample KS of T1");
  }
  for (State j = 1; j <= m.num_states(); ++j) {
    std::vector<double> a, b;
    for (const auto& p : prm) {
      if (p.x1 == j && std::isfinite(p.gap)) a.push_back(p.gap);
    }
    for (const auto& p : direct) {
      if (p.x1 == j && std::isfinite(p.gap)) b.push_back(p.gap);
    }
    if (a.empty() && b.empty()) continue;
    add_ks(cat("oracle.T2-T1.state", j), std::move(a), std::move(b),
           "two-sample KS of T2 - T1 given X_T1");
  }

  // Embedded transitions (X_0, X_T1, X_T2) as one categorical variable.
  std::map<std::tuple<State, State, State>, std::size_t> cell;
  auto key = [](const TwoJumps& p) { return std::tuple{p.start, p.x1, p.x2}; };
  for (const auto& p : prm) cell.emplace(key(p), 0);
  for (const auto& p : direct) cell.emplace(key(p), 0);
  std::size_t c = 0;
  for (auto& [k, idx] : cell) idx = c++;
  std::vector<std::vector<std::uint64_t>> table(2, std::vector<std::uint64_t>(cell.size(), 0));
  for (const auto& p : prm) ++table[0][cell[key(p)]];
  for (const auto& p : direct) ++table[1][cell[key(p)]];
  const auto chi = chi_square_homogeneity(table);

  const double m_tests = static_cast<double>(ks_tests.size() + 1);
  const double alpha = opts.alpha / m_tests;
  SuiteResult out{"oracle", {}, {}};
  for (const auto& t : ks_tests) out.verdicts.push_back(ks_verdict(t.name, t.ks, alpha, t.detail));
  out.verdicts.push_back({"oracle.transitions", chi.statistic,
                          chi.dof > 0 ? chi_square_critical(alpha, chi.dof) : 0.0,
                          chi.passes(alpha),
                          cat("chi-square homogeneity over ", chi.cells, " cells, dof=", chi.dof,
                              ", p=", chi.p_value, ", alpha=", alpha)});
  if (!skipped_tests.empty()) {
    std::string names;
    for (const auto& s : skipped_tests) names += (names.empty() ? "" : ", ") + s;
    out.verdicts.back().detail += "; too few samples for " + names;
  }
  return out;
}

SuiteResult check_explosion(const ModelSpec& spec, const VerifyOptions& opts) {
  constexpr double eps = 0.1;
  constexpr std::uint64_t jumps_per_path = 20;
  const MarkResolution res(spec.model);
  const auto states = active_states(spec.model);
  const PointStream base = suite_base(res, opts, "explosion");
  const std::size_t paths = (opts.samples + jumps_per_path - 1) / jumps_per_path;
  SolverOptions so;
  so.stop_after = jumps_per_path;
  struct Tally {
    std::uint64_t sojourns = 0;
    std::uint64_t short_ones = 0;
  };
  const auto tallies = collect(paths, opts.threads, [&](std::size_t r) {
    PointStream s = base.child(r);
    const State x0 = states[r % states.size()];
    Tally t;
    for (const auto& soj : simulate_path(res, s, {x0, 0.0, 0}, kLongHorizon, so).sojourns()) {
      if (soj.censored()) continue;
      ++t.sojourns;
      t.short_ones += soj.duration < eps;
    }
    return t;
  });
  Tally total;
  for (const auto& t : tallies) {
    total.sojourns += t.sojourns;
    total.short_ones += t.short_ones;
  }
  const double bound = -std::expm1(-eps * spec.model.bound());
  const double n = static_cast<double>(total.sojourns);
  const double frac = n > 0 ? static_cast<double>(total.short_ones) / n : 0.0;
  const double threshold = bound + 3.0 * binomial_standard_error(bound, n);
  return {"explosion",
          {{"explosion.short_sojourns", frac, threshold, n > 0 && frac <= threshold,
            cat(total.short_ones, " of ", total.sojourns, " sojourns shorter than ", eps,
                "; 1 - exp(-eps c) = ", bound)}},
          {}};
}

SuiteResult check_coupling(const ModelSpec& spec, const VerifyOptions& opts) {
  const RateModel& m = spec.model;
  const MarkResolution res(m);
  const auto states = active_states(m);
  const PointStream base = suite_base(res, opts, "coupling");
  constexpr double horizon = 20.0;
  SuiteResult out{"coupling", {}, {}};

  {
    const PointStream sub = base.child(0);
    const auto mism = collect(opts.coupling_paths, opts.threads, [&](std::size_t r) {
      PointStream s = sub.child(r);
      const InitialCondition z{states[r % states.size()], 0.25 * static_cast<double>(r % 4), 0};
      const auto p = simulate_coupled(res, s, z, z, horizon);
      return p.first.jumps != p.second.jumps || p.merge_time != 0.0;
    });
    const auto bad = static_cast<std::uint64_t>(std::count(mism.begin(), mism.end(), true));
    out.verdicts.push_back(zero_count_verdict("coupling.identical_initials", bad,
                                              opts.coupling_paths, "identical paths"));
  }

  if (states.size() >= 2) {
    const PointStream sub = base.child(1);
    struct Tally {
      std::uint64_t permanence = 0;
      std::uint64_t split_simultaneous = 0;
    };
    const auto tallies = collect(opts.coupling_paths, opts.threads, [&](std::size_t r) {
      PointStream s = sub.child(r);
      const State a = states[r % states.size()];
      const State b = states[(r + 1) % states.size()];
      const auto p = simulate_coupled(res, s, {a, 0.0, 0}, {b, 0.0, 0}, horizon);
      Tally t;
      t.permanence = meeting_stats(std::span(&p, 1)).permanence_violations;
      State s1 = a, s2 = b;
      for (const auto& e : p.events) {
        if (e.mover == Mover::both && s1 != s2) ++t.split_simultaneous;
        s1 = e.state1;
        s2 = e.state2;
      }
      return t;
    });
    std::uint64_t perm = 0, split = 0;
    for (const auto& t : tallies) {
      perm += t.permanence;
      split += t.split_simultaneous;
    }
    out.verdicts.push_back(zero_count_verdict("coupling.merge_permanence", perm,
                                              opts.coupling_paths, "merging permanence"));
    out.verdicts.push_back(zero_count_verdict("coupling.shared_jumps_need_shared_state", split,
                                              opts.coupling_paths,
                                              "simultaneous jumps only from a common state"));

    const State a = states[0], b = states[1];
    const double kh = *std::max_element(opts.kernel_ages.begin(), opts.kernel_ages.end());
    const PointStream msub = base.child(2);
    const auto pairs = collect(opts.samples, opts.threads, [&](std::size_t r) {
      PointStream s = msub.child(r);
      const auto p = simulate_coupled(res, s, {a, 0.0, 0}, {b, 0.0, 0}, kh);
      return std::pair{first_jump(p.first), first_jump(p.second)};
    });
    std::vector<Jump> f1, f2;
    for (const auto& [x, y] : pairs) {
      f1.push_back(x);
      f2.push_back(y);
    }
    for (auto& v : kernel_law_verdicts(m, a, 0, f1, opts.kernel_ages, "coupling.marginal1")) {
      out.verdicts.push_back(std::move(v));
    }
    for (auto& v : kernel_law_verdicts(m, b, 0, f2, opts.kernel_ages, "coupling.marginal2")) {
      out.verdicts.push_back(std::move(v));
    }
  }
  return out;
}

SuiteResult check_generator(const ModelSpec& spec, const VerifyOptions& opts) {
  const RateModel& m = spec.model;
  const MarkResolution res(m);
  const auto states = active_states(m);
  SuiteResult out{"generator", {}, {}};
  if (states.size() < 2) {
    out.skipped = "needs two states with exits";
    return out;
  }
  const State a = states[0], b = states[1];
  const std::vector<std::pair<AugmentedState, AugmentedState>> configs{
      {{a, 1.0, 0}, {a, 1.0, 0}}, {{a, 1.0, 0}, {b, 0.5, 0}}, {{a, 0.5, 0}, {a, 1.5, 0}}};
  const std::vector<std::pair<std::string, TestFunction>> phis{
      {"constant", constant_function(1.0)},
      {"first_indicator", first_state_indicator(b)},
      {"product_indicator", product_state_indicator(b, b)}};
  const PointStream base = suite_base(res, opts, "generator");
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& [z1, z2] = configs[c];
    for (const auto& [label, phi] : phis) {
      const auto d = dynkin_halving(res, phi, z1, z2, opts.dynkin_h, opts.dynkin_reps,
                                    base.child(c), opts.threads);
      out.verdicts.push_back(
          {cat("generator.config", c + 1, ".", label), std::abs(d.coarse.residual),
           3.0 * d.coarse.standard_error + d.bias_allowance(d.coarse.h), d.passes(),
           cat("A phi=", d.coarse.generator, "; r(h)=", d.coarse.residual, " se ",
               d.coarse.standard_error, "; r(h/2)=", d.fine.residual, " se ",
               d.fine.standard_error, "; trend=", d.trend, " se ", d.trend_standard_error,
               "; reps=", d.coarse.reps)});
    }
  }
  return out;
}

SuiteResult run_suite(std::string_view name, const ModelSpec& spec, const VerifyOptions& opts) {
  if (name == "validation") return check_validation(spec, opts);
  if (name == "layout") return check_layout(spec, opts);
  if (name == "identity") return check_identity(spec, opts);

  using Check = SuiteResult (*)(const ModelSpec&, const VerifyOptions&);
  static const std::map<std::string, Check, std::less<>> needs_valid_model{
      {"instantaneous_rate", check_instantaneous_rate},
      {"holding", check_holding},
      {"kernel", check_kernel},
      {"embedded_chain", check_embedded_chain},
      {"semi_markov", check_semi_markov},
      {"oracle", check_oracle},
      {"explosion", check_explosion},
      {"coupling", check_coupling},
      {"generator", check_generator}};
  const auto it = needs_valid_model.find(name);
  if (it == needs_valid_model.end()) throw std::invalid_argument(cat("unknown suite '", name, "'"));
  if (!validate(spec.model, opts.validation).passed()) {
    return {std::string(name), {}, "model fails validation; suite not run"};
  }
  return it->second(spec, opts);
}

}  // namespace smpsde
