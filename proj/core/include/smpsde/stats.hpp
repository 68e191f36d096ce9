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

// Goodness-of-fit machinery for the verification suites. Critical values are
// asymptotic; every suite runs at sample sizes where that is accurate.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace smpsde {

class SampleSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sorted sample with a right-continuous ecdf.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> sample);

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted() const { return sorted_; }
  /// Fraction of the sample <= x.
  double ecdf(double x) const;
  /// Smallest sample value whose ecdf reaches p (p in (0, 1]).
  double quantile(double p) const;
  double mean() const { return mean_; }
  double variance() const;
  double standard_error() const;

 private:
  std::vector<double> sorted_;
  double mean_ = 0.0;
};

/// c(alpha) / sqrt(n_eff) with c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_critical_value(double alpha, double effective_n);

struct KsResult {
  double statistic = 0.0;
  double effective_n = 0.0;
  double critical_1pct = 0.0;
  double critical_5pct = 0.0;

  double critical(double alpha) const { return ks_critical_value(alpha, effective_n); }
  bool passes(double alpha) const { return statistic < critical(alpha); }
};

inline constexpr std::size_t kMinSampleSize = 50;

/// sup_x |F_n(x) - F(x)|. Throws SampleSizeError below kMinSampleSize.
KsResult ks_one_sample(std::span<const double> sample,
                       const std::function<double(double)>& cdf);
/// sup_x |F_a(x) - F_b(x)| with n_eff = n_a n_b / (n_a + n_b).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t cells = 0;  // after merging sparse cells

  bool passes(double alpha) const { return dof == 0 || p_value > alpha; }
};

/// Upper-alpha quantile of chi-square with `dof` degrees of freedom.
double chi_square_critical(double alpha, int dof);

/// Pearson goodness of fit. Adjacent cells are merged until every expected
/// count is at least 5.
ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> expected_probs);

/// Test of homogeneity for an r x c table of counts (rows are samples).
/// Columns are merged until every pooled expected count is at least 5.
ChiSquareResult chi_square_homogeneity(const std::vector<std::vector<std::uint64_t>>& table);

double binomial_standard_error(double p, double n);

/// One line of a verification report.
struct Verdict {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

nlohmann::json to_json(const Verdict& v);

}  // namespace smpsde
