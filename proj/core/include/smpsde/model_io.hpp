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

// JSON model documents. Two kinds are accepted:
//
//   {"kind": "catalog", "name": "weibull", "params": {...}}
//   {"kind": "grid", "name": "...", "num_states": 2, "count_classes": [0, 3],
//    "pairs": [{"from": 1, "to": 2, "breaks": [0, 1], "values": [[0.5, 2], [1, 1]]}]}
//
// Either kind may carry "sup_norms": a K x K matrix that replaces the
// derived sup norms, and "num_states" which must then match the model.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "smpsde/catalog.hpp"
#include "smpsde/rates.hpp"

namespace smpsde {

struct ModelSpec {
  RateModel model;
  std::optional<ClosedFormGamma> closed_form_gamma;
  /// Normalised document (defaults expanded); hashing this identifies the model.
  nlohmann::json canonical;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError on schema violations.
ModelSpec model_from_json(const nlohmann::json& doc);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);
/// fnv1a64 of the compact dump of `doc`, as 16 hex digits.
std::string json_hash(const nlohmann::json& doc);

}  // namespace smpsde
