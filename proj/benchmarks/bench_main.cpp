// Copyright 2026 The spikecp Authors.
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

#include "spikecp/gp_quantile.hpp"
#include "spikecp/limit_kernel.hpp"
#include "spikecp/seq_spectrum.hpp"
#include "spikecp/sim_lab.hpp"

namespace {

using namespace spikecp;

ScenarioSpec scenario_for(benchmark::State& state) {
  ScenarioSpec s = desk_scenario();
  s.n = static_cast<std::size_t>(state.range(0));
  s.p = s.n / 2;
  return s;
}

void BM_EigenPath(benchmark::State& state, EigenSolver solver) {
  const ScenarioSpec s = scenario_for(state);
  const DataMatrix x = generate(s, 0);
  PathOptions options;
  options.solver = solver;
  for (auto _ : state) {
    EigenPath path = eigen_path(x, s.t0, 3, options);
    benchmark::DoNotOptimize(path.value(path.n(), 0));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(s.n - first_jump(s.n, s.t0) + 1));
}

void BM_EigenPathKrylov(benchmark::State& state) { BM_EigenPath(state, EigenSolver::kKrylov); }
void BM_EigenPathDense(benchmark::State& state) { BM_EigenPath(state, EigenSolver::kDense); }

BENCHMARK(BM_EigenPathKrylov)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EigenPathDense)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

// Grid assembly and factorization for three spikes.
void BM_GridCovariance(benchmark::State& state) {
  const auto grid = GridSpec::uniform(0.1, static_cast<std::size_t>(state.range(0)));
  const std::vector<double> alphas = {17.24, 7.24, 4.24};
  for (auto _ : state) {
    // A fresh kernel each time so the coefficient cache starts cold.
    const GaussianKernel k = g_kernel(alphas, 0.5, MomentInputs::diagonal_gaussian(alphas));
    const GridCovariance cov = build_grid_covariance(k, grid);
    benchmark::DoNotOptimize(cov.min_eigenvalue);
  }
}
BENCHMARK(BM_GridCovariance)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SupQuantiles(benchmark::State& state) {
  const std::vector<double> alphas = {17.24, 7.24, 4.24};
  const GaussianKernel k = g_kernel(alphas, 0.5, MomentInputs::diagonal_gaussian(alphas));
  const GridCovariance cov =
      build_grid_covariance(k, GridSpec::uniform(0.1, static_cast<std::size_t>(state.range(0))));
  SimulationOptions options;
  options.replicates = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    const QuantileTable t = simulate_sup_quantiles(cov, {0.95}, options);
    benchmark::DoNotOptimize(t.q_max[0]);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_SupQuantiles)->Args({100, 4000})->Args({200, 10000})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
