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

#include "smpsde/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smpsde {

namespace {

using json = nlohmann::json;

PairMatrix matrix_from_json(const json& rows, const char* field) {
  if (!rows.is_array() || rows.empty()) {
    throw std::invalid_argument(std::string(field) + " must be a non-empty square matrix");
  }
  const int k = static_cast<int>(rows.size());
  PairMatrix m(k);
  for (State i = 1; i <= k; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i - 1)];
    if (!row.is_array() || static_cast<int>(row.size()) != k) {
      throw std::invalid_argument(std::string(field) + " must be a square matrix");
    }
    for (State j = 1; j <= k; ++j) {
      const double v = row[static_cast<std::size_t>(j - 1)].get<double>();
      if (i != j && !(v >= 0.0 && std::isfinite(v))) {
        throw std::invalid_argument(std::string(field) + " entries must be finite and >= 0");
      }
      m(i, j) = i == j ? 0.0 : v;
    }
  }
  return m;
}

double row_sum(const PairMatrix& w, State i) {
  double s = 0.0;
  for (State j = 1; j <= w.num_states(); ++j) {
    if (j != i) s += w(i, j);
  }
  return s;
}

PairMatrix scaled(const PairMatrix& w, double factor) {
  PairMatrix out(w.num_states());
  for (State i = 1; i <= w.num_states(); ++i) {
    for (State j = 1; j <= w.num_states(); ++j) out(i, j) = w(i, j) * factor;
  }
  return out;
}

json merged(json defaults, const json& overrides) {
  if (overrides.is_object()) {
    for (const auto& [key, value] : overrides.items()) {
      if (!defaults.contains(key)) {
        throw std::invalid_argument("unknown catalog parameter '" + key + "'");
      }
      defaults[key] = value;
    }
  } else if (!overrides.is_null()) {
    throw std::invalid_argument("catalog params must be an object");
  }
  return defaults;
}

double positive(const json& p, const char* key) {
  const double v = p.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(key) + " must be positive and finite");
  }
  return v;
}

CatalogEntry ctmc(std::string name, const json& params) {
  PairMatrix r = matrix_from_json(params.at("rates"), "rates");
  RateFunction fn = [r](State i, State j, double, Count) { return r(i, j); };
  CatalogEntry e;
  e.model = RateModel::from_function(std::move(name), r.num_states(), fn, r, false);
  e.closed_form_gamma = [r](State i, double y, Count) { return row_sum(r, i) * y; };
  e.params = params;
  return e;
}

CatalogEntry capped_power(std::string name, const json& params, double shape) {
  PairMatrix w = matrix_from_json(params.at("weights"), "weights");
  const double alpha = positive(params, "alpha");
  const double cap = positive(params, "cap");
  const double knee = std::pow(cap / alpha, 1.0 / shape);
  RateFunction fn = [w, alpha, cap, shape](State i, State j, double y, Count) {
    return w(i, j) * std::min(alpha * std::pow(y, shape), cap);
  };
  CatalogEntry e;
  e.model = RateModel::from_function(std::move(name), w.num_states(), fn, scaled(w, cap),
                                     false, {knee});
  e.closed_form_gamma = [w, alpha, cap, shape, knee](State i, double y, Count) {
    const double ramp = alpha * std::pow(std::min(y, knee), shape + 1.0) / (shape + 1.0);
    return row_sum(w, i) * (ramp + cap * std::max(0.0, y - knee));
  };
  e.params = params;
  return e;
}

CatalogEntry n_decaying(std::string name, const json& params) {
  PairMatrix w = matrix_from_json(params.at("weights"), "weights");
  const double alpha = positive(params, "alpha");
  RateFunction fn = [w, alpha](State i, State j, double, Count n) {
    return w(i, j) * alpha / (1.0 + static_cast<double>(n));
  };
  CatalogEntry e;
  e.model = RateModel::from_function(std::move(name), w.num_states(), fn, scaled(w, alpha),
                                     true);
  e.closed_form_gamma = [w, alpha](State i, double y, Count n) {
    return row_sum(w, i) * alpha / (1.0 + static_cast<double>(n)) * y;
  };
  e.params = params;
  return e;
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"ctmc2", "ctmc3", "age_linear", "weibull", "n_decaying", "two_block"};
}

CatalogEntry make_catalog_model(std::string_view name, const json& params) {
  if (name == "ctmc2") {
    return ctmc("ctmc2", merged({{"rates", {{0, 2}, {3, 0}}}}, params));
  }
  if (name == "ctmc3") {
    return ctmc("ctmc3",
                merged({{"rates", {{0, 2, 1}, {3, 0, 1}, {0.5, 1.5, 0}}}}, params));
  }
  if (name == "two_block") {
    return ctmc("two_block",
                merged({{"rates", {{0, 2, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 3}, {0, 0, 1.5, 0}}}},
                       params));
  }
  if (name == "age_linear") {
    return capped_power(
        "age_linear",
        merged({{"alpha", 1.0}, {"cap", 2.0}, {"weights", {{0, 1}, {1, 0}}}}, params), 1.0);
  }
  if (name == "weibull") {
    auto p = merged({{"alpha", 1.0},
                     {"shape", 1.5},
                     {"cap", 3.0},
                     {"weights", {{0, 1, 0.5}, {1, 0, 1}, {0.5, 1.5, 0}}}},
                    params);
    return capped_power("weibull", p, positive(p, "shape"));
  }
  if (name == "n_decaying") {
    return n_decaying("n_decaying",
                      merged({{"alpha", 2.0}, {"weights", {{0, 1, 0.5}, {1, 0, 1}, {1, 1, 0}}}},
                             params));
  }
  throw std::invalid_argument("unknown catalog model '" + std::string(name) + "'");
}

}  // namespace smpsde
