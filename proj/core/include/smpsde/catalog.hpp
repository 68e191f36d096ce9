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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "smpsde/rates.hpp"

namespace smpsde {

/// gamma_i(y, n) in closed form.
using ClosedFormGamma = std::function<double(State, double, Count)>;

struct CatalogEntry {
  RateModel model;
  /// Present for every built-in; kept apart from `model` so that callers
  /// can use it as an independent check on quadrature.
  std::optional<ClosedFormGamma> closed_form_gamma;
  /// Fully expanded parameters, including defaults.
  nlohmann::json params;
};

/// Built-in rate fields. Each kind has a named default instance:
///
///   ctmc2       2 states, lambda_12 = 2, lambda_21 = 3
///   ctmc3       3 states, constant rates
///   age_linear  lambda_ij = w_ij min(alpha y, cap); default 2 states, min(y, 2)
///   weibull     lambda_ij = w_ij min(alpha y^shape, cap); default 3 states
///   n_decaying  lambda_ij = w_ij alpha / (1 + n); default 3 states
///   two_block   4 states split into the closed classes {1, 2} and {3, 4}
///
/// `params` overrides any default field ("rates" for ctmc kinds, "weights",
/// "alpha", "cap", "shape").
std::vector<std::string> catalog_names();
CatalogEntry make_catalog_model(std::string_view name, const nlohmann::json& params = {});

}  // namespace smpsde
