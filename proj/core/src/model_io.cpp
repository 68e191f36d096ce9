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

#include "smpsde/model_io.hpp"

#include <cstdio>
#include <set>
#include <utility>

namespace smpsde {

namespace {

using json = nlohmann::json;

PairMatrix parse_sup_norms(const json& rows, int k) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != k) {
    throw ConfigError("sup_norms must be a " + std::to_string(k) + "x" + std::to_string(k) +
                      " matrix");
  }
  PairMatrix m(k);
  for (State i = 1; i <= k; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i - 1)];
    if (!row.is_array() || static_cast<int>(row.size()) != k) {
      throw ConfigError("sup_norms must be square");
    }
    for (State j = 1; j <= k; ++j) {
      const auto& cell = row[static_cast<std::size_t>(j - 1)];
      if (!cell.is_number()) throw ConfigError("sup_norms entries must be numbers");
      m(i, j) = i == j ? 0.0 : cell.get<double>();
    }
  }
  return m;
}

ModelSpec catalog_model(const json& doc) {
  if (!doc.contains("name") || !doc["name"].is_string()) {
    throw ConfigError("catalog model needs a string 'name'");
  }
  const auto name = doc["name"].get<std::string>();
  CatalogEntry entry;
  try {
    entry = make_catalog_model(name, doc.value("params", json()));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  ModelSpec spec;
  spec.model = std::move(entry.model);
  spec.closed_form_gamma = std::move(entry.closed_form_gamma);
  spec.canonical = {{"kind", "catalog"}, {"name", name}, {"params", entry.params}};
  return spec;
}

ModelSpec grid_model(const json& doc) {
  const int k = doc.value("num_states", 0);
  if (k < 1) throw ConfigError("grid model needs num_states >= 1");
  StepTable table;
  table.class_starts = doc.value("count_classes", std::vector<Count>{0});
  table.entries.resize(static_cast<std::size_t>(k) * k);
  if (!doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw ConfigError("grid model needs a 'pairs' array");
  }
  std::set<std::pair<State, State>> seen;
  for (const auto& p : doc["pairs"]) {
    const State i = p.at("from").get<State>();
    const State j = p.at("to").get<State>();
    if (i < 1 || i > k || j < 1 || j > k || i == j) {
      throw ConfigError("grid pair (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is out of range");
    }
    if (!seen.emplace(i, j).second) {
      throw ConfigError("grid pair (" + std::to_string(i) + "," + std::to_string(j) +
                        ") listed twice");
    }
    auto& e = table.entries[static_cast<std::size_t>(i - 1) * k + (j - 1)];
    e.breaks = p.at("breaks").get<std::vector<double>>();
    e.values = p.at("values").get<std::vector<std::vector<double>>>();
  }
  ModelSpec spec;
  try {
    spec.model = RateModel::from_table(doc.value("name", std::string("grid")), k,
                                       std::move(table));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  spec.canonical = doc;
  spec.canonical.erase("sup_norms");
  spec.canonical["kind"] = "grid";
  return spec;
}

}  // namespace

ModelSpec model_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("model must be a JSON object");
  const auto kind = doc.value("kind", std::string("catalog"));
  ModelSpec spec;
  try {
    if (kind == "catalog") {
      spec = catalog_model(doc);
    } else if (kind == "grid") {
      spec = grid_model(doc);
    } else {
      throw ConfigError("unknown model kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model: ") + e.what());
  }
  const int k = spec.model.num_states();
  if (doc.contains("num_states") && doc["num_states"].get<int>() != k) {
    throw ConfigError("num_states does not match the model");
  }
  if (doc.contains("sup_norms")) {
    spec.model = spec.model.with_sup_norms(parse_sup_norms(doc["sup_norms"], k));
    spec.canonical["sup_norms"] = doc["sup_norms"];
  }
  spec.canonical["num_states"] = k;
  return spec;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string json_hash(const json& doc) { return hex64(fnv1a64(doc.dump())); }

}  // namespace smpsde
