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

// Small builders shared by the unit tests.

#pragma once

#include <cmath>
#include <vector>

#include "smpsde/catalog.hpp"
#include "smpsde/rates.hpp"

namespace smpsde::testing {

/// Constant rates from a dense matrix (diagonal ignored), as a step table.
inline RateModel constant_table(const std::vector<std::vector<double>>& rates) {
  const int k = static_cast<int>(rates.size());
  StepTable t;
  t.entries.resize(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      auto& e = t.entries[static_cast<std::size_t>(i) * k + j];
      e.breaks = {0.0};
      e.values = {{i == j ? 0.0 : rates[i][j]}};
    }
  }
  return RateModel::from_table("constant", k, t);
}

/// Callable constant rates; quadrature paths are exercised instead of the
/// exact table arithmetic.
inline RateModel constant_callable(const std::vector<std::vector<double>>& rates) {
  const int k = static_cast<int>(rates.size());
  PairMatrix sup(k);
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= k; ++j) sup(i, j) = i == j ? 0.0 : rates[i - 1][j - 1];
  }
  return RateModel::from_function(
      "constant_callable", k, [sup](State i, State j, double, Count) { return sup(i, j); }, sup,
      false);
}

inline RateModel catalog(const char* name) { return make_catalog_model(name).model; }

/// Exponential quantile; used to draw reference samples in tests.
inline double exp_quantile(double rate, double u) { return -std::log1p(-u) / rate; }

}  // namespace smpsde::testing
