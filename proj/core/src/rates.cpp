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

#include "smpsde/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace smpsde {

QuadratureError::QuadratureError(State state, Count count, double age)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "quadrature did not converge (state " << state << ", count " << count
           << ", age " << age << ")";
        return os.str();
      }()),
      state_(state),
      count_(count),
      age_(age) {}

struct RateModel::Impl {
  std::string name;
  int k = 0;
  bool n_dependent = false;
  RateFunction fn;
  std::optional<StepTable> table;
  PairMatrix sups;
  std::vector<double> row_bounds;
  double bound = 0.0;
  std::vector<double> breakpoints;

  void finish() {
    row_bounds.assign(static_cast<std::size_t>(k), 0.0);
    bound = 0.0;
    for (State i = 1; i <= k; ++i) {
      double c = 0.0;
      for (State j = 1; j <= k; ++j) {
        if (j != i) c += sups(i, j);
      }
      row_bounds[static_cast<std::size_t>(i - 1)] = c;
      bound = std::max(bound, c);
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                      breakpoints.end());
    std::erase_if(breakpoints, [](double b) { return !(b > 0.0) || !std::isfinite(b); });
  }

  std::size_t count_class(Count n) const {
    const auto& starts = table->class_starts;
    auto it = std::upper_bound(starts.begin(), starts.end(), n);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - starts.begin() - 1));
  }

  double table_rate(State i, State j, double y, Count n) const {
    const auto& e = table->at(k, i, j);
    if (e.breaks.empty()) return 0.0;
    auto it = std::upper_bound(e.breaks.begin(), e.breaks.end(), y);
    const auto seg = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - e.breaks.begin() - 1));
    return e.values[count_class(n)][seg];
  }

  double table_integral(State i, State j, double a, double b, Count n) const {
    const auto& e = table->at(k, i, j);
    if (e.breaks.empty() || b <= a) return 0.0;
    const auto& vals = e.values[count_class(n)];
    double total = 0.0;
    for (std::size_t s = 0; s < e.breaks.size(); ++s) {
      const double lo = std::max(a, e.breaks[s]);
      const double hi = std::min(b, s + 1 < e.breaks.size()
                                        ? e.breaks[s + 1]
                                        : std::numeric_limits<double>::infinity());
      if (hi > lo) total += vals[s] * (hi - lo);
    }
    return total;
  }
};

RateModel RateModel::from_function(std::string name, int num_states, RateFunction fn,
                                   PairMatrix sup_norms, bool n_dependent,
                                   std::vector<double> age_breakpoints) {
  if (num_states < 1) throw std::invalid_argument("num_states must be positive");
  if (!fn) throw std::invalid_argument("rate function is empty");
  if (sup_norms.num_states() != num_states) {
    throw std::invalid_argument("sup_norms dimension does not match num_states");
  }
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->k = num_states;
  impl->n_dependent = n_dependent;
  impl->fn = std::move(fn);
  impl->sups = std::move(sup_norms);
  impl->breakpoints = std::move(age_breakpoints);
  impl->finish();
  RateModel m;
  m.impl_ = std::move(impl);
  return m;
}

RateModel RateModel::from_table(std::string name, int num_states, StepTable table) {
  if (num_states < 1) throw std::invalid_argument("num_states must be positive");
  const auto pairs = static_cast<std::size_t>(num_states) * num_states;
  if (table.entries.size() != pairs) {
    throw std::invalid_argument("step table must have K*K entries");
  }
  if (table.class_starts.empty() || table.class_starts.front() != 0 ||
      !std::is_sorted(table.class_starts.begin(), table.class_starts.end()) ||
      std::adjacent_find(table.class_starts.begin(), table.class_starts.end()) !=
          table.class_starts.end()) {
    throw std::invalid_argument("count classes must start at 0 and strictly increase");
  }
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->k = num_states;
  impl->sups = PairMatrix(num_states);
  bool n_dep = false;
  for (State i = 1; i <= num_states; ++i) {
    for (State j = 1; j <= num_states; ++j) {
      const auto& e = table.at(num_states, i, j);
      if (i == j || e.breaks.empty()) continue;
      if (e.breaks.front() != 0.0 ||
          std::adjacent_find(e.breaks.begin(), e.breaks.end(),
                             std::greater_equal<>()) != e.breaks.end()) {
        throw std::invalid_argument("age breakpoints must start at 0 and strictly increase");
      }
      if (e.values.size() != table.class_starts.size()) {
        throw std::invalid_argument("step table needs one value row per count class");
      }
      double sup = 0.0;
      for (const auto& row : e.values) {
        if (row.size() != e.breaks.size()) {
          throw std::invalid_argument("step table value row length must match breakpoints");
        }
        for (double v : row) {
          if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("step table values must be finite and nonnegative");
          }
          sup = std::max(sup, v);
        }
        if (row != e.values.front()) n_dep = true;
      }
      impl->sups(i, j) = sup;
      impl->breakpoints.insert(impl->breakpoints.end(), e.breaks.begin() + 1, e.breaks.end());
    }
  }
  impl->n_dependent = n_dep;
  impl->table = std::move(table);
  impl->finish();
  RateModel m;
  m.impl_ = std::move(impl);
  return m;
}

RateModel RateModel::with_sup_norms(PairMatrix sup_norms) const {
  if (sup_norms.num_states() != num_states()) {
    throw std::invalid_argument("sup_norms dimension does not match num_states");
  }
  auto impl = std::make_shared<Impl>(*impl_);
  impl->sups = std::move(sup_norms);
  impl->finish();
  RateModel m;
  m.impl_ = std::move(impl);
  return m;
}

const std::string& RateModel::name() const { return impl_->name; }
int RateModel::num_states() const { return impl_->k; }
bool RateModel::n_dependent() const { return impl_->n_dependent; }
bool RateModel::tabulated() const { return impl_->table.has_value(); }

double RateModel::rate(State i, State j, double age, Count n) const {
  if (i == j) return 0.0;
  return impl_->table ? impl_->table_rate(i, j, age, n) : impl_->fn(i, j, age, n);
}

double RateModel::exit_rate(State i, double age, Count n) const {
  double total = 0.0;
  for (State j = 1; j <= impl_->k; ++j) {
    if (j != i) total += rate(i, j, age, n);
  }
  return total;
}

double RateModel::sup_norm(State i, State j) const { return i == j ? 0.0 : impl_->sups(i, j); }
const PairMatrix& RateModel::sup_norms() const { return impl_->sups; }
double RateModel::row_bound(State i) const {
  return impl_->row_bounds[static_cast<std::size_t>(i - 1)];
}
double RateModel::bound() const { return impl_->bound; }
std::span<const double> RateModel::age_breakpoints() const { return impl_->breakpoints; }

std::optional<double> RateModel::exact_exit_integral(State i, double a, double b,
                                                     Count n) const {
  if (!impl_->table) return std::nullopt;
  double total = 0.0;
  for (State j = 1; j <= impl_->k; ++j) {
    if (j != i) total += impl_->table_integral(i, j, a, b, n);
  }
  return total;
}

std::optional<double> RateModel::exact_pair_integral(State i, State j, double a, double b,
                                                     Count n) const {
  if (!impl_->table) return std::nullopt;
  if (i == j) return 0.0;
  return impl_->table_integral(i, j, a, b, n);
}

namespace {

// Sub-intervals of [a, b] separated by the model's age breakpoints.
template <class Fn>
void for_each_smooth_piece(const RateModel& model, double a, double b, Fn&& fn) {
  double lo = a;
  for (double bp : model.age_breakpoints()) {
    if (bp <= lo) continue;
    if (bp >= b) break;
    fn(lo, bp);
    lo = bp;
  }
  fn(lo, b);
}

}  // namespace

double integrate_exit_rate(const RateModel& model, State i, double from, double to, Count n,
                           const QuadratureOptions& opts) {
  if (to <= from) return 0.0;
  if (auto exact = model.exact_exit_integral(i, from, to, n)) return *exact;
  double total = 0.0;
  for_each_smooth_piece(model, from, to, [&](double a, double b) {
    auto piece = adaptive_simpson([&](double s) { return model.exit_rate(i, s, n); }, a, b,
                                  opts);
    if (!piece) throw QuadratureError(i, n, to);
    total += *piece;
  });
  return total;
}

double gamma(const RateModel& model, State i, double y, Count n,
             const QuadratureOptions& opts) {
  if (y < 0.0) throw std::domain_error("age must be nonnegative");
  return integrate_exit_rate(model, i, 0.0, y, n, opts);
}

double holding_cdf(const RateModel& model, State i, double y, Count n,
                   const QuadratureOptions& opts) {
  return -std::expm1(-gamma(model, i, y, n, opts));
}

double holding_survival(const RateModel& model, State i, double y, Count n,
                        const QuadratureOptions& opts) {
  return std::exp(-gamma(model, i, y, n, opts));
}

double holding_pdf(const RateModel& model, State i, double y, Count n,
                   const QuadratureOptions& opts) {
  return model.exit_rate(i, y, n) * holding_survival(model, i, y, n, opts);
}

std::vector<double> embedded_probs(const RateModel& model, State i, double y, Count n) {
  const int k = model.num_states();
  std::vector<double> p(static_cast<std::size_t>(k), 0.0);
  const double total = model.exit_rate(i, y, n);
  if (!(total > 0.0)) {
    p[static_cast<std::size_t>(i - 1)] = 1.0;
    return p;
  }
  for (State j = 1; j <= k; ++j) {
    if (j != i) p[static_cast<std::size_t>(j - 1)] = model.rate(i, j, y, n) / total;
  }
  return p;
}

namespace {

// Exact kernel for step tables: on each piece where every exit rate of i is
// constant the integrand is a scaled exponential.
double step_kernel(const RateModel& model, State i, State j, double y, Count n) {
  double total = 0.0;
  double gamma_lo = 0.0;
  for_each_smooth_piece(model, 0.0, y, [&](double a, double b) {
    const double lam_i = model.exit_rate(i, a, n);
    const double lam_ij = model.rate(i, j, a, n);
    const double width = b - a;
    if (lam_ij > 0.0) {
      total += lam_i > 0.0
                   ? lam_ij * std::exp(-gamma_lo) * -std::expm1(-lam_i * width) / lam_i
                   : lam_ij * std::exp(-gamma_lo) * width;
    }
    gamma_lo += lam_i * width;
  });
  return total;
}

}  // namespace

double kernel(const RateModel& model, State i, State j, double y, Count n,
              const QuadratureOptions& opts) {
  if (i == j) throw std::invalid_argument("kernel is defined for i != j");
  if (y < 0.0) throw std::domain_error("age must be nonnegative");
  if (y == 0.0) return 0.0;
  if (model.tabulated()) return step_kernel(model, i, j, y, n);
  double total = 0.0;
  double gamma_lo = 0.0;
  for_each_smooth_piece(model, 0.0, y, [&](double a, double b) {
    auto integrand = [&](double s) {
      const double g = gamma_lo + integrate_exit_rate(model, i, a, s, n, opts);
      return std::exp(-g) * model.rate(i, j, s, n);
    };
    auto piece = adaptive_simpson(integrand, a, b, opts);
    if (!piece) throw QuadratureError(i, n, y);
    total += *piece;
    gamma_lo += integrate_exit_rate(model, i, a, b, n, opts);
  });
  return total;
}

double saturation_age(const RateModel& model, State i, Count n, double target,
                      double max_age, const QuadratureOptions& opts) {
  double y = 1.0;
  double g = gamma(model, i, y, n, opts);
  while (g < target) {
    if (2.0 * y > max_age) {
      std::ostringstream os;
      os << "cumulative exit rate of state " << i << " at count " << n
         << " stays below " << target << " up to age " << max_age;
      throw std::domain_error(os.str());
    }
    g += integrate_exit_rate(model, i, y, 2.0 * y, n, opts);
    y *= 2.0;
  }
  return y;
}

std::vector<double> jump_distribution(const RateModel& model, State i, Count n,
                                      const QuadratureOptions& opts) {
  const double horizon = saturation_age(model, i, n, 40.0, 1e6, opts);
  std::vector<double> q(static_cast<std::size_t>(model.num_states()), 0.0);
  for (State j = 1; j <= model.num_states(); ++j) {
    if (j != i) q[static_cast<std::size_t>(j - 1)] = kernel(model, i, j, horizon, n, opts);
  }
  return q;
}

double rate_identity_residual(const RateModel& model, State i, State j, double y, Count n,
                              const QuadratureOptions& opts) {
  const double survival = holding_survival(model, i, y, n, opts);
  const double pdf = model.exit_rate(i, y, n) * survival;
  const double p = embedded_probs(model, i, y, n)[static_cast<std::size_t>(j - 1)];
  const double target = i == j ? 0.0 : model.rate(i, j, y, n);
  return p * pdf / survival - target;
}

ValidationReport validate(const RateModel& model, const ValidationOptions& opts) {
  ValidationReport report;
  const int k = model.num_states();
  for (State i = 1; i <= k; ++i) {
    report.row_bounds.push_back(model.row_bound(i));
    for (State j = 1; j <= k; ++j) {
      const double s = model.sup_norm(i, j);
      if (j != i && !(std::isfinite(s) && s >= 0.0)) {
        report.violations.push_back({"A1", i, j, 0.0, 0, s, "sup norm is not finite"});
      }
    }
  }
  report.bound = model.bound();

  std::vector<double> ages;
  const int g = std::max(2, opts.age_grid_points);
  for (int q = 0; q < g; ++q) ages.push_back(opts.y_check * q / (g - 1));
  for (double bp : model.age_breakpoints()) {
    if (bp > opts.y_check) break;
    ages.push_back(bp);
    ages.push_back(std::nextafter(bp, 0.0));
  }

  for (Count n : opts.counts) {
    for (State i = 1; i <= k; ++i) {
      for (State j = 1; j <= k; ++j) {
        if (j == i) continue;
        const double sup = model.sup_norm(i, j);
        bool reported = false;
        for (double y : ages) {
          const double r = model.rate(i, j, y, n);
          if (!(r >= 0.0) || !std::isfinite(r)) {
            report.violations.push_back({"nonnegative", i, j, y, n, r,
                                         "rate is negative or not finite"});
            reported = true;
          } else if (r > sup) {
            report.violations.push_back({"A1", i, j, y, n, r,
                                         "rate exceeds declared sup norm"});
            reported = true;
          }
          if (reported) break;
        }
      }
      const double gi = gamma(model, i, opts.y_check, n);
      if (!(gi > opts.gamma_min)) {
        report.violations.push_back({"A2", i, 0, opts.y_check, n, gi,
                                     "cumulative exit rate does not exceed gamma_min"});
      }
    }
  }
  return report;
}

ValidationReport validate(const RateModel& model, double y_check, double gamma_min) {
  ValidationOptions opts;
  opts.y_check = y_check;
  opts.gamma_min = gamma_min;
  return validate(model, opts);
}

}  // namespace smpsde
