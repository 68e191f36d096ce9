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

#include <benchmark/benchmark.h>

#include "smpsde/catalog.hpp"
#include "smpsde/coupling.hpp"
#include "smpsde/layout.hpp"
#include "smpsde/oracle.hpp"
#include "smpsde/prm.hpp"
#include "smpsde/rates.hpp"
#include "smpsde/solver.hpp"

namespace {

using namespace smpsde;

void BM_Philox(benchmark::State& state) {
  CounterRng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(BM_Philox);

void BM_PointStream(benchmark::State& state) {
  PointStream s(1, 0, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(s.next_point());
}
BENCHMARK(BM_PointStream);

void BM_Gamma(benchmark::State& state) {
  const RateModel m = make_catalog_model("weibull").model;
  double y = 0.0;
  for (auto _ : state) {
    y = y > 4.0 ? 0.0 : y + 0.37;
    benchmark::DoNotOptimize(gamma(m, 1, y, 0));
  }
}
BENCHMARK(BM_Gamma);

void BM_ResolveMark(benchmark::State& state) {
  const MarkResolution res(make_catalog_model("weibull").model);
  PointStream s(2, 0, res.strip_height());
  for (auto _ : state) {
    const Point p = s.next_point();
    benchmark::DoNotOptimize(res.resolve_mark(2, p.mark, 0, p.mark));
  }
}
BENCHMARK(BM_ResolveMark);

// One path to horizon 100 per iteration; items are jumps.
void BM_SimulatePath(benchmark::State& state, const char* model) {
  const MarkResolution res(make_catalog_model(model).model);
  const PointStream base(3, 0, res.strip_height());
  std::uint64_t r = 0, jumps = 0;
  for (auto _ : state) {
    PointStream s = base.child(r++);
    const auto t = simulate_path(res, s, {1, 0.0, 0}, 100.0);
    jumps += t.jumps.size();
    benchmark::DoNotOptimize(t);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(jumps));
}
BENCHMARK_CAPTURE(BM_SimulatePath, ctmc3, "ctmc3");
BENCHMARK_CAPTURE(BM_SimulatePath, weibull, "weibull");
BENCHMARK_CAPTURE(BM_SimulatePath, n_decaying, "n_decaying");

void BM_OraclePath(benchmark::State& state) {
  OracleSampler o(make_catalog_model("weibull").model, 4);
  std::uint64_t jumps = 0;
  for (auto _ : state) {
    const auto t = o.simulate_path({1, 0.0, 0}, 100.0);
    jumps += t.jumps.size();
    benchmark::DoNotOptimize(t);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(jumps));
}
BENCHMARK(BM_OraclePath);

void BM_CoupledPath(benchmark::State& state) {
  const MarkResolution res(make_catalog_model("weibull").model);
  const PointStream base(5, 0, res.strip_height());
  std::uint64_t r = 0;
  for (auto _ : state) {
    PointStream s = base.child(r++);
    benchmark::DoNotOptimize(simulate_coupled(res, s, {1, 0.0, 0}, {2, 0.5, 0}, 100.0));
  }
}
BENCHMARK(BM_CoupledPath);

}  // namespace

BENCHMARK_MAIN();
