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

#include "smpsde_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "smpsde/coupling.hpp"
#include "smpsde/layout.hpp"
#include "smpsde/oracle.hpp"
#include "smpsde/parallel.hpp"
#include "smpsde/prm.hpp"
#include "smpsde/trajectory_io.hpp"

#ifndef SMPSDE_VERSION
#define SMPSDE_VERSION "0.0.0"
#endif

namespace smpsde::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys{"model",  "seed",    "horizon", "replications",
                                          "threads", "out",    "initial", "simulate",
                                          "couple", "kernel",  "verify",  "validation"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& into) {
  if (obj.contains(key)) into = obj.at(key).get<T>();
}

InitialCondition read_initial(const json& doc, const std::string& where) {
  reject_unknown(doc, {"state", "age", "count"}, where);
  InitialCondition z{1, 0.0, 0};
  read(doc, "state", z.state);
  read(doc, "age", z.age);
  read(doc, "count", z.count);
  return z;
}

void check_initial(const InitialCondition& z, int k, const std::string& where) {
  if (z.state < 1 || z.state > k) {
    throw ConfigError(where + ".state must lie in 1.." + std::to_string(k));
  }
  if (!(z.age >= 0.0) || !std::isfinite(z.age)) throw ConfigError(where + ".age must be >= 0");
  if (z.count < 0) throw ConfigError(where + ".count must be >= 0");
}

json initial_json(const InitialCondition& z) {
  return {{"state", z.state}, {"age", z.age}, {"count", z.count}};
}

void apply_document(const json& doc, RunConfig& c) {
  reject_unknown(doc, kTopLevelKeys, "config");
  c.model = model_from_json(doc.contains("model") ? doc.at("model")
                                                  : json{{"kind", "catalog"}, {"name", "ctmc2"}});
  read(doc, "seed", c.seed);
  read(doc, "horizon", c.horizon);
  read(doc, "replications", c.replications);
  read(doc, "threads", c.threads);
  if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
  if (doc.contains("initial")) c.initial = read_initial(doc.at("initial"), "initial");
  c.initial2 = c.initial;

  if (doc.contains("simulate")) {
    const auto& s = doc.at("simulate");
    reject_unknown(s, {"sampler", "dump_points"}, "simulate");
    read(s, "sampler", c.sampler);
    read(s, "dump_points", c.dump_points);
  }
  if (doc.contains("couple")) {
    const auto& s = doc.at("couple");
    reject_unknown(s, {"initial2", "dynkin"}, "couple");
    if (s.contains("initial2")) c.initial2 = read_initial(s.at("initial2"), "couple.initial2");
    if (s.contains("dynkin")) {
      const auto& d = s.at("dynkin");
      reject_unknown(d, {"enabled", "h", "reps", "phis", "target_state"}, "couple.dynkin");
      read(d, "enabled", c.dynkin.enabled);
      read(d, "h", c.dynkin.h);
      read(d, "reps", c.dynkin.reps);
      read(d, "phis", c.dynkin.phis);
      read(d, "target_state", c.dynkin.target);
    }
  }
  if (doc.contains("kernel")) {
    const auto& s = doc.at("kernel");
    reject_unknown(s, {"y_max", "y_step", "counts"}, "kernel");
    read(s, "y_max", c.kernel_y_max);
    read(s, "y_step", c.kernel_y_step);
    read(s, "counts", c.kernel_counts);
  }
  if (doc.contains("verify")) {
    const auto& s = doc.at("verify");
    reject_unknown(s,
                   {"suites", "samples", "alpha", "layout_checks", "coupling_paths",
                    "dynkin_reps", "dynkin_h", "kernel_ages"},
                   "verify");
    if (s.contains("suites")) {
      c.suites = s.at("suites").get<std::vector<std::string>>();
      if (c.suites.empty()) throw ConfigError("verify.suites selects no suite");
    }
    read(s, "samples", c.verify.samples);
    read(s, "alpha", c.verify.alpha);
    read(s, "layout_checks", c.verify.layout_checks);
    read(s, "coupling_paths", c.verify.coupling_paths);
    read(s, "dynkin_reps", c.verify.dynkin_reps);
    read(s, "dynkin_h", c.verify.dynkin_h);
    read(s, "kernel_ages", c.verify.kernel_ages);
  }
  if (doc.contains("validation")) {
    const auto& s = doc.at("validation");
    reject_unknown(s, {"y_check", "gamma_min", "override"}, "validation");
    read(s, "override", c.allow_invalid);
    read(s, "y_check", c.verify.validation.y_check);
    read(s, "gamma_min", c.verify.validation.gamma_min);
  }
}

void check_config(const RunConfig& c) {
  const int k = c.model.model.num_states();
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) {
    throw ConfigError("horizon must be positive and finite");
  }
  if (c.replications < 1) throw ConfigError("replications must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  check_initial(c.initial, k, "initial");
  check_initial(c.initial2, k, "couple.initial2");
  if (c.sampler != "prm" && c.sampler != "oracle") {
    throw ConfigError("simulate.sampler must be 'prm' or 'oracle'");
  }
  if (!(c.dynkin.h > 0.0)) throw ConfigError("couple.dynkin.h must be positive");
  if (c.dynkin.reps < 1) throw ConfigError("couple.dynkin.reps must be >= 1");
  if (c.dynkin.target < 1 || c.dynkin.target > k) {
    throw ConfigError("couple.dynkin.target_state must lie in 1.." + std::to_string(k));
  }
  for (const auto& p : c.dynkin.phis) {
    if (p != "constant" && p != "first_indicator" && p != "product_indicator") {
      throw ConfigError("unknown test function '" + p + "'");
    }
  }
  if (!(c.kernel_y_max >= 0.0) || !(c.kernel_y_step > 0.0)) {
    throw ConfigError("kernel.y_max must be >= 0 and kernel.y_step > 0");
  }
  for (Count n : c.kernel_counts) {
    if (n < 0) throw ConfigError("kernel.counts must be >= 0");
  }
  for (const auto& s : c.suites) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw ConfigError("unknown suite '" + s + "'");
    }
  }
  if (c.verify.samples < kMinSampleSize) {
    throw ConfigError("verify.samples must be >= " + std::to_string(kMinSampleSize));
  }
  if (!(c.verify.alpha > 0.0 && c.verify.alpha < 1.0)) {
    throw ConfigError("verify.alpha must lie in (0, 1)");
  }
  if (c.verify.kernel_ages.empty()) throw ConfigError("verify.kernel_ages must be non-empty");
  if (!(c.verify.validation.y_check > 0.0) || !(c.verify.validation.gamma_min > 0.0)) {
    throw ConfigError("validation.y_check and validation.gamma_min must be positive");
  }
}

json canonical_of(const RunConfig& c) {
  return {{"model", c.model.canonical},
          {"seed", c.seed},
          {"horizon", c.horizon},
          {"replications", c.replications},
          {"initial", initial_json(c.initial)},
          {"simulate", {{"sampler", c.sampler}, {"dump_points", c.dump_points}}},
          {"couple",
           {{"initial2", initial_json(c.initial2)},
            {"dynkin",
             {{"enabled", c.dynkin.enabled},
              {"h", c.dynkin.h},
              {"reps", c.dynkin.reps},
              {"phis", c.dynkin.phis},
              {"target_state", c.dynkin.target}}}}},
          {"kernel",
           {{"y_max", c.kernel_y_max}, {"y_step", c.kernel_y_step}, {"counts", c.kernel_counts}}},
          {"verify",
           {{"suites", c.suites.empty() ? suite_names() : c.suites},
            {"samples", c.verify.samples},
            {"alpha", c.verify.alpha},
            {"layout_checks", c.verify.layout_checks},
            {"coupling_paths", c.verify.coupling_paths},
            {"dynkin_reps", c.verify.dynkin_reps},
            {"dynkin_h", c.verify.dynkin_h},
            {"kernel_ages", c.verify.kernel_ages}}},
          {"validation",
           {{"y_check", c.verify.validation.y_check},
            {"gamma_min", c.verify.validation.gamma_min},
            {"override", c.allow_invalid}}}};
}

Metadata metadata(const RunConfig& c, const std::string& command) {
  return {{"tool", std::string("smpsde ") + SMPSDE_VERSION},
          {"command", command},
          {"model", c.model.model.name()},
          {"seed", std::to_string(c.seed)},
          {"model_hash", json_hash(c.model.canonical)},
          {"config_hash", config_hash(c)}};
}

json metadata_json(const Metadata& meta) {
  json j = json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

std::string numbered(const char* stem, std::uint64_t r, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05llu.%s", stem, static_cast<unsigned long long>(r), ext);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto os = open_output(path);
  os << doc.dump(2) << '\n';
}

void require_valid_model(const RunConfig& c, std::ostream& log) {
  const auto report = validate(c.model.model, c.verify.validation);
  if (report.passed()) return;
  const auto& v = report.violations.front();
  std::ostringstream os;
  os << "model '" << c.model.model.name() << "' fails assumption " << v.assumption << " for ("
     << v.from << "," << v.to << ") at y=" << v.age << " n=" << v.count << ": " << v.detail;
  if (!c.allow_invalid) throw ConfigError(os.str());
  log << "warning: " << os.str() << " (validation.override is set)\n";
}

std::uint64_t stream_tag(const char* tag) { return fnv1a64(tag); }

TestFunction make_phi(const std::string& name, State target) {
  if (name == "constant") return constant_function(1.0);
  if (name == "first_indicator") return first_state_indicator(target);
  return product_state_indicator(target, target);
}

}  // namespace

RunConfig parse_config(const json& doc, const Overrides& overrides) {
  RunConfig c;
  try {
    apply_document(doc.is_null() ? json::object() : doc, c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (overrides.seed) c.seed = *overrides.seed;
  if (overrides.out) c.out = *overrides.out;
  if (overrides.threads) c.threads = *overrides.threads;
  c.verify.seed = c.seed;
  c.verify.threads = c.threads;
  check_config(c);
  c.canonical = canonical_of(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, overrides);
}

std::string config_hash(const RunConfig& config) { return json_hash(config.canonical); }

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  require_valid_model(c, log);
  const RateModel& m = c.model.model;
  const MarkResolution res(m);
  const PointStream base(c.seed, stream_tag("simulate"), res.strip_height());
  const std::uint64_t oracle_parent = stream_tag("simulate.oracle");
  std::filesystem::create_directories(c.out);

  std::vector<Trajectory> paths(c.replications);
  parallel_for(c.replications, c.threads, [&](std::size_t r) {
    if (c.sampler == "oracle") {
      OracleSampler sampler(m, c.seed, derive_stream_id(oracle_parent, r));
      paths[r] = sampler.simulate_path(c.initial, c.horizon);
    } else {
      PointStream s = base.child(r);
      paths[r] = simulate_path(res, s, c.initial, c.horizon);
    }
  });

  const int k = m.num_states();
  std::vector<double> occupation(static_cast<std::size_t>(k), 0.0);
  std::vector<std::uint64_t> final_states(static_cast<std::size_t>(k), 0);
  std::uint64_t total_jumps = 0, max_jumps = 0;
  json files = json::array();
  const Metadata meta = metadata(c, "simulate");
  for (std::uint64_t r = 0; r < c.replications; ++r) {
    const Trajectory& t = paths[r];
    Metadata row_meta = meta;
    row_meta.emplace_back("sampler", c.sampler);
    row_meta.emplace_back("horizon", format_double(c.horizon));
    row_meta.emplace_back("replication", std::to_string(r));
    const auto name = numbered("trajectory", r, "csv");
    auto os = open_output(c.out / name);
    write_trajectory_csv(os, t, row_meta);
    files.push_back(name);
    if (c.dump_points && c.sampler == "prm") {
      auto ps = open_output(c.out / numbered("points", r, "csv"));
      write_metadata(ps, row_meta);
      write_points_csv(ps, base.child(r), c.horizon);
    }
    double prev = 0.0;
    State s = t.initial.state;
    for (const auto& j : t.jumps) {
      occupation[static_cast<std::size_t>(s - 1)] += j.time - prev;
      prev = j.time;
      s = j.state;
    }
    occupation[static_cast<std::size_t>(s - 1)] += t.horizon - prev;
    ++final_states[static_cast<std::size_t>(s - 1)];
    total_jumps += t.jumps.size();
    max_jumps = std::max<std::uint64_t>(max_jumps, t.jumps.size());
  }
  const double total_time = c.horizon * static_cast<double>(c.replications);
  for (double& o : occupation) o /= total_time;

  json summary{{"meta", metadata_json(meta)},
               {"sampler", c.sampler},
               {"horizon", c.horizon},
               {"replications", c.replications},
               {"initial", initial_json(c.initial)},
               {"total_jumps", total_jumps},
               {"mean_jumps", static_cast<double>(total_jumps) / c.replications},
               {"max_jumps", max_jumps},
               {"occupation_fraction", occupation},
               {"final_state_counts", final_states},
               {"files", files}};
  write_json(c.out / "summary.json", summary);
  log << "simulate: " << c.replications << " paths, " << total_jumps << " jumps -> "
      << c.out.string() << '\n';
  return kExitPass;
}

int cmd_couple(const RunConfig& c, std::ostream& log) {
  require_valid_model(c, log);
  const RateModel& m = c.model.model;
  const MarkResolution res(m);
  const PointStream base(c.seed, stream_tag("couple"), res.strip_height());
  std::filesystem::create_directories(c.out);

  std::vector<CoupledPath> paths(c.replications);
  parallel_for(c.replications, c.threads, [&](std::size_t r) {
    PointStream s = base.child(r);
    paths[r] = simulate_coupled(res, s, c.initial, c.initial2, c.horizon);
  });
  const Metadata meta = metadata(c, "couple");
  for (std::uint64_t r = 0; r < c.replications; ++r) {
    Metadata row_meta = meta;
    row_meta.emplace_back("horizon", format_double(c.horizon));
    row_meta.emplace_back("replication", std::to_string(r));
    auto os = open_output(c.out / numbered("coupled", r, "csv"));
    write_coupled_csv(os, paths[r], row_meta);
  }
  const MeetingSummary ms = meeting_stats(paths);

  bool pass = true;
  json dynkin = json::array();
  if (c.dynkin.enabled) {
    const PointStream dbase(c.seed, stream_tag("couple.dynkin"), res.strip_height());
    for (const auto& name : c.dynkin.phis) {
      const auto d = dynkin_halving(res, make_phi(name, c.dynkin.target), c.initial, c.initial2,
                                    c.dynkin.h, c.dynkin.reps, dbase, c.threads);
      pass = pass && d.passes();
      dynkin.push_back({{"phi", name},
                        {"generator", d.coarse.generator},
                        {"h", d.coarse.h},
                        {"residual", d.coarse.residual},
                        {"standard_error", d.coarse.standard_error},
                        {"residual_half_step", d.fine.residual},
                        {"standard_error_half_step", d.fine.standard_error},
                        {"slope", d.slope},
                        {"slope_standard_error", d.slope_standard_error},
                        {"trend", d.trend},
                        {"trend_standard_error", d.trend_standard_error},
                        {"reps", d.coarse.reps},
                        {"pass", d.passes()}});
      log << "couple: dynkin " << name << " residual " << d.coarse.residual << " (se "
          << d.coarse.standard_error << ") " << (d.passes() ? "PASS" : "FAIL") << '\n';
    }
  }
  json summary{{"meta", metadata_json(meta)},
               {"horizon", c.horizon},
               {"replications", c.replications},
               {"initial1", initial_json(c.initial)},
               {"initial2", initial_json(c.initial2)},
               {"meeting", to_json(ms)},
               {"dynkin", dynkin},
               {"passed", pass}};
  write_json(c.out / "summary.json", summary);
  log << "couple: " << ms.merged << " of " << ms.paths << " pairs merged -> " << c.out.string()
      << '\n';
  return pass ? kExitPass : kExitFailure;
}

int cmd_kernel(const RunConfig& c, std::ostream& log) {
  require_valid_model(c, log);
  const RateModel& m = c.model.model;
  const int k = m.num_states();
  std::filesystem::create_directories(c.out);
  const auto steps =
      static_cast<std::uint64_t>(std::floor(c.kernel_y_max / c.kernel_y_step + 1e-9));
  constexpr double kRowSumTolerance = 1e-8;

  const Metadata meta = metadata(c, "kernel");
  auto os = open_output(c.out / "kernel.csv");
  write_metadata(os, meta);
  os << "y,n,from,to,Q,F,p\n";
  double worst = 0.0;
  for (Count n : c.kernel_counts) {
    for (std::uint64_t q = 0; q <= steps; ++q) {
      const double y = static_cast<double>(q) * c.kernel_y_step;
      for (State i = 1; i <= k; ++i) {
        const double f = c.model.closed_form_gamma
                             ? -std::expm1(-(*c.model.closed_form_gamma)(i, y, n))
                             : holding_cdf(m, i, y, n);
        const auto p = embedded_probs(m, i, y, n);
        double row = 0.0;
        for (State j = 1; j <= k; ++j) {
          if (j == i) continue;
          const double qij = kernel(m, i, j, y, n);
          row += qij;
          os << format_double(y) << ',' << n << ',' << i << ',' << j << ','
             << format_double(qij) << ',' << format_double(f) << ','
             << format_double(p[static_cast<std::size_t>(j - 1)]) << '\n';
        }
        worst = std::max(worst, std::abs(row - f));
      }
    }
  }
  const bool pass = worst <= kRowSumTolerance;
  const Verdict v{"kernel.row_sums", worst, kRowSumTolerance, pass,
                  "max over rows of |sum_j Q_ij(y, n) - F(y | i, n)|"};
  json summary{{"meta", metadata_json(meta)},
               {"y_max", c.kernel_y_max},
               {"y_step", c.kernel_y_step},
               {"counts", c.kernel_counts},
               {"verdicts", json::array({to_json(v)})},
               {"passed", pass}};
  write_json(c.out / "summary.json", summary);
  log << "kernel: " << (steps + 1) << " ages, row-sum deviation " << worst << ' '
      << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitPass : kExitFailure;
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  std::filesystem::create_directories(c.out);
  const auto& suites = c.suites.empty() ? suite_names() : c.suites;
  json results = json::array();
  bool pass = true;
  for (const auto& name : suites) {
    const SuiteResult r = run_suite(name, c.model, c.verify);
    pass = pass && r.passed();
    results.push_back(to_json(r));
    log << (r.passed() ? "PASS " : "FAIL ") << name;
    if (!r.skipped.empty()) log << " (" << r.skipped << ')';
    for (const auto& v : r.verdicts) {
      if (!v.pass) log << "\n  " << v.name << ": " << v.detail;
    }
    log << '\n';
  }
  json doc{{"meta", metadata_json(metadata(c, "verify"))}, {"suites", results}, {"passed", pass}};
  write_json(c.out / "verdicts.json", doc);
  return pass ? kExitPass : kExitFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-Markov paths driven by a Poisson random measure", "smpsde"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("smpsde ") + SMPSDE_VERSION);

  std::string config_path;
  Overrides ov;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "Simulate trajectories and write CSVs plus a summary"},
      {"verify", "Run the verification suites and write verdicts.json"},
      {"couple", "Simulate coupled pairs, meeting statistics and Dynkin checks"},
      {"kernel", "Tabulate Q_ij(y, n), F and p on an age grid"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config document")->check(CLI::ExistingFile);
    sub->add_option("--seed", ov.seed, "Seed (overrides the config)");
    sub->add_option("--out", ov.out, "Output directory (overrides the config)");
    sub->add_option("--threads", ov.threads, "Worker threads (overrides the config)")
        ->check(CLI::PositiveNumber);
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    const RunConfig c = config_path.empty() ? parse_config(json::object(), ov)
                                            : load_config(config_path, ov);
    if (app.got_subcommand("simulate")) return cmd_simulate(c, out);
    if (app.got_subcommand("verify")) return cmd_verify(c, out);
    if (app.got_subcommand("couple")) return cmd_couple(c, out);
    return cmd_kernel(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace smpsde::cli
