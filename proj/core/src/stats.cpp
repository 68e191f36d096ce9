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

#include "smpsde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

namespace smpsde {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> sample)
    : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw SampleSizeError("empirical distribution needs data");
  std::sort(sorted_.begin(), sorted_.end());
  mean_ = std::accumulate(sorted_.begin(), sorted_.end(), 0.0) /
          static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::ecdf(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("quantile level must be in (0, 1]");
  const auto n = static_cast<double>(sorted_.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * n));
  idx = std::clamp<std::size_t>(idx, 1, sorted_.size());
  return sorted_[idx - 1];
}

double EmpiricalDistribution::variance() const {
  if (sorted_.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : sorted_) ss += (x - mean_) * (x - mean_);
  return ss / static_cast<double>(sorted_.size() - 1);
}

double EmpiricalDistribution::standard_error() const {
  return std::sqrt(variance() / static_cast<double>(sorted_.size()));
}

double ks_critical_value(double alpha, double effective_n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(effective_n);
}

namespace {

KsResult make_ks(double d, double n_eff) {
  return {d, n_eff, ks_critical_value(0.01, n_eff), ks_critical_value(0.05, n_eff)};
}

void require_size(std::size_t n) {
  if (n < kMinSampleSize) {
    throw SampleSizeError("sample of size " + std::to_string(n) + " is below the minimum of " +
                          std::to_string(kMinSampleSize));
  }
}

}  // namespace

KsResult ks_one_sample(std::span<const double> sample,
                       const std::function<double(double)>& cdf) {
  require_size(sample.size());
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t k = 0; k < xs.size();) {
    // Ties: the ecdf jumps once over the whole run of equal values.
    std::size_t run_end = k;
    while (run_end + 1 < xs.size() && xs[run_end + 1] == xs[k]) ++run_end;
    const double f = cdf(xs[k]);
    d = std::max({d, static_cast<double>(run_end + 1) / n - f, f - static_cast<double>(k) / n});
    k = run_end + 1;
  }
  return make_ks(d, n);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_size(a.size());
  require_size(b.size());
  std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const auto na = static_cast<double>(xa.size());
  const auto nb = static_cast<double>(xb.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < xa.size() && ib < xb.size()) {
    const double x = std::min(xa[ia], xb[ib]);
    while (ia < xa.size() && xa[ia] == x) ++ia;
    while (ib < xb.size() && xb[ib] == x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return make_ks(d, na * nb / (na + nb));
}

double chi_square_critical(double alpha, int dof) {
  if (dof <= 0) return 0.0;
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

namespace {

double upper_tail(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

// Groups of consecutive cells whose pooled weight reaches `min_weight`; a
// short tail is folded into the previous group.
std::vector<std::vector<std::size_t>> merge_cells(std::span<const double> weights,
                                                  double min_weight) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  double acc = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    current.push_back(c);
    acc += weights[c];
    if (acc >= min_weight) {
      groups.push_back(std::move(current));
      current.clear();
      acc = 0.0;
    }
  }
  if (!current.empty()) {
    if (groups.empty()) {
      groups.push_back(std::move(current));
    } else {
      groups.back().insert(groups.back().end(), current.begin(), current.end());
    }
  }
  return groups;
}

}  // namespace

ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size() || observed.empty()) {
    throw std::invalid_argument("observed and expected must have the same nonzero length");
  }
  const double total =
      static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  require_size(static_cast<std::size_t>(total));
  const double prob_sum = std::accumulate(expected_probs.begin(), expected_probs.end(), 0.0);
  std::vector<double> expected;
  for (double p : expected_probs) expected.push_back(p / prob_sum * total);
  const auto groups = merge_cells(expected, 5.0);
  ChiSquareResult r;
  for (const auto& g : groups) {
    double o = 0.0, e = 0.0;
    for (auto c : g) {
      o += static_cast<double>(observed[c]);
      e += expected[c];
    }
    if (e > 0.0) {
      r.statistic += (o - e) * (o - e) / e;
    } else if (o > 0.0) {
      r.statistic = std::numeric_limits<double>::infinity();
    }
  }
  r.cells = groups.size();
  r.dof = static_cast<int>(groups.size()) - 1;
  r.p_value = std::isinf(r.statistic) ? 0.0 : upper_tail(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_homogeneity(const std::vector<std::vector<std::uint64_t>>& table) {
  if (table.size() < 2) throw std::invalid_argument("homogeneity test needs two or more rows");
  const std::size_t cols = table.front().size();
  for (const auto& row : table) {
    if (row.size() != cols) throw std::invalid_argument("ragged contingency table");
  }
  std::vector<double> row_totals;
  std::vector<double> col_totals(cols, 0.0);
  double grand = 0.0;
  for (const auto& row : table) {
    double t = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      t += static_cast<double>(row[c]);
      col_totals[c] += static_cast<double>(row[c]);
    }
    require_size(static_cast<std::size_t>(t));
    row_totals.push_back(t);
    grand += t;
  }
  // Merge on the smallest row's expected counts, then drop empty columns.
  const double min_row = *std::min_element(row_totals.begin(), row_totals.end());
  std::vector<double> min_expected;
  for (double ct : col_totals) min_expected.push_back(ct * min_row / grand);
  auto groups = merge_cells(min_expected, 5.0);
  std::erase_if(groups, [&](const auto& g) {
    double s = 0.0;
    for (auto c : g) s += col_totals[c];
    return s == 0.0;
  });
  ChiSquareResult r;
  for (std::size_t row = 0; row < table.size(); ++row) {
    for (const auto& g : groups) {
      double o = 0.0, ct = 0.0;
      for (auto c : g) {
        o += static_cast<double>(table[row][c]);
        ct += col_totals[c];
      }
      const double e = row_totals[row] * ct / grand;
      r.statistic += (o - e) * (o - e) / e;
    }
  }
  r.cells = groups.size();
  r.dof = groups.size() < 2 ? 0
                            : static_cast<int>((table.size() - 1) * (groups.size() - 1));
  r.p_value = upper_tail(r.statistic, r.dof);
  return r;
}

double binomial_standard_error(double p, double n) {
  // Reference probabilities from quadrature can overshoot [0, 1] by rounding.
  p = std::clamp(p, 0.0, 1.0);
  return std::sqrt(p * (1.0 - p) / n);
}

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j = {{"name", v.name},
                      {"statistic", v.statistic},
                      {"threshold", v.threshold},
                      {"pass", v.pass}};
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

}  // namespace smpsde
