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

// Age- and count-dependent transition-rate fields lambda_ij(y, n) on a finite
// state space {1, ..., K}, together with the quantities derived from them:
// cumulative exit rate, holding-time law, embedded jump probabilities and the
// semi-Markov kernel.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "smpsde/quadrature.hpp"

namespace smpsde {

/// States are labelled 1..K; their natural order is the order used to lay
/// out mark intervals.
using State = int;
using Count = std::int64_t;

/// Dense K x K table addressed with 1-based states. Diagonal entries are
/// carried but ignored by every consumer.
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(int num_states, double fill = 0.0)
      : k_(num_states), data_(static_cast<std::size_t>(num_states) * num_states, fill) {}

  int num_states() const { return k_; }
  double& operator()(State i, State j) { return data_[index(i, j)]; }
  double operator()(State i, State j) const { return data_[index(i, j)]; }

 private:
  std::size_t index(State i, State j) const {
    return static_cast<std::size_t>(i - 1) * k_ + static_cast<std::size_t>(j - 1);
  }
  int k_ = 0;
  std::vector<double> data_;
};

/// lambda(from, to, age, count) for from != to.
using RateFunction = std::function<double(State, State, double, Count)>;

/// Right-continuous step representation of a rate field. Every ordered pair
/// has its own age breakpoints; values are given per count class, where
/// class c covers counts n with class_starts[c] <= n < class_starts[c + 1].
struct StepTable {
  struct Entry {
    std::vector<double> breaks;               // breaks[0] == 0, strictly increasing
    std::vector<std::vector<double>> values;  // values[class][segment]
  };
  std::vector<Count> class_starts{0};
  std::vector<Entry> entries;  // K * K, row-major, 1-based pair (i, j) at (i-1)*K + (j-1)

  const Entry& at(int num_states, State i, State j) const {
    return entries[static_cast<std::size_t>(i - 1) * num_states + (j - 1)];
  }
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(State state, Count count, double age);
  State state() const { return state_; }
  Count count() const { return count_; }
  double age() const { return age_; }

 private:
  State state_;
  Count count_;
  double age_;
};

/// Immutable transition-rate field. Copies share the underlying definition.
class RateModel {
 public:
  RateModel() = default;

  /// `sup_norms(i, j)` must bound `fn(i, j, ., .)` everywhere. Age breakpoints
  /// are points where the rate may fail to be smooth; quadrature splits there.
  static RateModel from_function(std::string name, int num_states, RateFunction fn,
                                 PairMatrix sup_norms, bool n_dependent,
                                 std::vector<double> age_breakpoints = {});

  /// Sup norms are derived exactly as the largest tabulated value per pair.
  static RateModel from_table(std::string name, int num_states, StepTable table);

  /// Same rate field, different declared sup norms (which move the mark
  /// layout). Used for configs that pin sup norms explicitly.
  RateModel with_sup_norms(PairMatrix sup_norms) const;

  bool valid() const { return impl_ != nullptr; }
  const std::string& name() const;
  int num_states() const;
  bool n_dependent() const;
  bool tabulated() const;

  double rate(State i, State j, double age, Count n) const;
  /// lambda_i(y, n), the total exit rate.
  double exit_rate(State i, double age, Count n) const;

  double sup_norm(State i, State j) const;
  const PairMatrix& sup_norms() const;
  /// c_i: sum of sup norms over the exits of state i.
  double row_bound(State i) const;
  /// c: max_i c_i.
  double bound() const;

  /// Ages where some rate may be non-smooth, sorted and deduplicated.
  std::span<const double> age_breakpoints() const;

  /// Exact integral of lambda_i over [a, b] for step tables; nullopt otherwise.
  std::optional<double> exact_exit_integral(State i, double a, double b, Count n) const;
  std::optional<double> exact_pair_integral(State i, State j, double a, double b,
                                            Count n) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

struct ValidationOptions {
  double y_check = 10.0;
  double gamma_min = 1.0;
  std::vector<Count> counts{0, 1, 2, 3, 5, 10};
  int age_grid_points = 201;
};

struct Violation {
  std::string assumption;  // "A1", "A2" or "nonnegative"
  State from = 0;
  State to = 0;  // 0 when the violation concerns a whole row
  double age = 0.0;
  Count count = 0;
  double value = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<double> row_bounds;  // c_1..c_K
  double bound = 0.0;              // c
  bool passed() const { return violations.empty(); }
};

ValidationReport validate(const RateModel& model, const ValidationOptions& opts = {});
ValidationReport validate(const RateModel& model, double y_check, double gamma_min);

/// Integral of the exit rate of `i` over [from, to] at count n.
double integrate_exit_rate(const RateModel& model, State i, double from, double to,
                           Count n, const QuadratureOptions& opts = {});

/// gamma_i(y, n) = integral_0^y lambda_i(s, n) ds.
double gamma(const RateModel& model, State i, double y, Count n,
             const QuadratureOptions& opts = {});

/// F(y | i, n) = 1 - exp(-gamma_i(y, n)).
double holding_cdf(const RateModel& model, State i, double y, Count n,
                   const QuadratureOptions& opts = {});
/// exp(-gamma_i(y, n)), computed without cancellation.
double holding_survival(const RateModel& model, State i, double y, Count n,
                        const QuadratureOptions& opts = {});
/// f(y | i, n) = lambda_i(y, n) exp(-gamma_i(y, n)).
double holding_pdf(const RateModel& model, State i, double y, Count n,
                   const QuadratureOptions& opts = {});

/// Row i of p(y, n), indexed by state - 1. A row with zero exit rate puts all
/// mass on i itself.
std::vector<double> embedded_probs(const RateModel& model, State i, double y, Count n);

/// Q_ij(y, n) = integral_0^y exp(-gamma_i(s, n)) lambda_ij(s, n) ds.
double kernel(const RateModel& model, State i, State j, double y, Count n,
              const QuadratureOptions& opts = {});

/// Smallest power-of-two age at which gamma_i(., n) reaches `target`.
/// Throws std::domain_error when no such age exists below `max_age`.
double saturation_age(const RateModel& model, State i, Count n, double target = 40.0,
                      double max_age = 1e6, const QuadratureOptions& opts = {});

/// lim_{y->inf} Q_ij(y, n) for all j (entry i is zero), indexed by state - 1.
std::vector<double> jump_distribution(const RateModel& model, State i, Count n,
                                      const QuadratureOptions& opts = {});

/// p_ij f / (1 - F) - lambda_ij; identically zero for i == j by definition.
double rate_identity_residual(const RateModel& model, State i, State j, double y,
                              Count n, const QuadratureOptions& opts = {});

}  // namespace smpsde
