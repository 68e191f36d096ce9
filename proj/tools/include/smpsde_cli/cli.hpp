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

// The smpsde command line: config ingestion, the four subcommands and their
// artifacts. Kept in a library so tests can drive it in-process.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smpsde/model_io.hpp"
#include "smpsde/solver.hpp"
#include "smpsde/verify.hpp"

namespace smpsde::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Flag values; each one present overrides the config document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

struct DynkinConfig {
  bool enabled = true;
  double h = 0.02;
  std::uint64_t reps = 100'000;
  std::vector<std::string> phis{"constant", "first_indicator", "product_indicator"};
  State target = 2;
};

struct RunConfig {
  ModelSpec model;
  std::uint64_t seed = 1;
  double horizon = 10.0;
  std::uint64_t replications = 10;
  unsigned threads = 1;
  std::filesystem::path out = "out";
  InitialCondition initial{1, 0.0, 0};

  std::string sampler = "prm";  // prm | oracle
  bool dump_points = false;

  InitialCondition initial2{1, 0.0, 0};
  DynkinConfig dynkin;

  double kernel_y_max = 2.0;
  double kernel_y_step = 0.05;
  std::vector<Count> kernel_counts{0};

  std::vector<std::string> suites;  // empty selects every suite
  VerifyOptions verify;
  /// Run simulate, couple and kernel on a model that fails validation.
  bool allow_invalid = false;

  /// Effective settings; hashed into output metadata. Excludes threads and
  /// the output directory, which never change results.
  nlohmann::json canonical;
};

/// Applies `doc` over the defaults, then the overrides. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

std::string config_hash(const RunConfig& config);

int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_couple(const RunConfig& config, std::ostream& log);
int cmd_kernel(const RunConfig& config, std::ostream& log);

/// args[0] is the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smpsde::cli
