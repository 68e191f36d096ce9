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

// Verification suites. Each suite checks one family of properties for a
// model and reports one verdict per test. Sampling suites draw from streams
// keyed by the seed and indexed by replication, so reports do not depend on
// the thread count.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "smpsde/model_io.hpp"
#include "smpsde/rates.hpp"
#include "smpsde/solver.hpp"
#include "smpsde/stats.hpp"

namespace smpsde {

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 100'000;  // paths or sojourns per sampled test
  unsigned threads = 1;
  double alpha = 0.01;  // family-wise level for KS and chi-square suites
  ValidationOptions validation;
  std::size_t layout_checks = 10'000;
  int identity_grid = 100;
  std::vector<double> kernel_ages{0.25, 0.5, 1.0};
  std::size_t coupling_paths = 1'000;
  std::uint64_t dynkin_reps = 100'000;
  double dynkin_h = 0.02;
  /// States tested by the holding suite; empty means every state with exits.
  std::vector<State> holding_states;
};

struct SuiteResult {
  std::string suite;
  std::vector<Verdict> verdicts;
  /// Non-empty when the suite did not run; a skipped suite does not pass.
  std::string skipped;

  bool passed() const;
};

nlohmann::json to_json(const SuiteResult& r);

/// validation, layout, identity, instantaneous_rate, holding, kernel,
/// embedded_chain, semi_markov, oracle, explosion, coupling, generator.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for unknown names.
SuiteResult run_suite(std::string_view name, const ModelSpec& spec, const VerifyOptions& opts);

SuiteResult check_validation(const ModelSpec& spec, const VerifyOptions& opts);
/// Random (i, y, n) probes of the mark layout against a brute-force scan.
SuiteResult check_layout(const ModelSpec& spec, const VerifyOptions& opts);
/// p_ij f / (1 - F) = lambda_ij on an age grid, to 1e-9.
SuiteResult check_identity(const ModelSpec& spec, const VerifyOptions& opts);
/// dQ_ij/dy / (1 - F) = lambda_ij by central differences at 20 ages.
SuiteResult check_instantaneous_rate(const ModelSpec& spec, const VerifyOptions& opts);
/// KS of fresh sojourns against 1 - exp(-gamma); the closed-form gamma is
/// used when the model has one.
SuiteResult check_holding(const ModelSpec& spec, const VerifyOptions& opts);
/// P[X_{T1} = j, T1 <= y | X_0 = i] against Q_ij(y, 0) within 3 binomial
/// standard errors.
SuiteResult check_kernel(const ModelSpec& spec, const VerifyOptions& opts);
/// Frequencies of X_{T1} against lim_y Q_ij(y, n) within 3 standard errors.
SuiteResult check_embedded_chain(const ModelSpec& spec, const VerifyOptions& opts);
/// Given X_{T1}, the law of (X_{T2}, T2 - T1) does not change across
/// strata of (X_0, T1). Skipped for count-dependent models.
SuiteResult check_semi_markov(const ModelSpec& spec, const VerifyOptions& opts);
/// Point-stream solver against the inverse-transform oracle.
SuiteResult check_oracle(const ModelSpec& spec, const VerifyOptions& opts);
/// Fraction of sojourns shorter than 0.1 against 1 - exp(-0.1 c).
SuiteResult check_explosion(const ModelSpec& spec, const VerifyOptions& opts);
/// Path-wise coupling structure and the kernel law of coupled marginals.
SuiteResult check_coupling(const ModelSpec& spec, const VerifyOptions& opts);
/// Dynkin residuals of the coupled generator with step halving.
SuiteResult check_generator(const ModelSpec& spec, const VerifyOptions& opts);

/// Empirical P[X_{T1} = j, T1 <= y] from first jumps against Q_ij(y, n).
/// `first_jumps` holds T1 (or +inf when no jump was seen) and X_{T1}.
std::vector<Verdict> kernel_law_verdicts(const RateModel& model, State i, Count n,
                                         const std::vector<Jump>& first_jumps,
                                         const std::vector<double>& ages,
                                         const std::string& label);

}  // namespace smpsde
