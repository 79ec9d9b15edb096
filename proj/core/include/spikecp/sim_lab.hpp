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

#pragma once

// Data generation under the null and the shifted-spike alternatives, and the
// Monte-Carlo experiments built on it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spikecp/change_test.hpp"
#include "spikecp/rng.hpp"
#include "spikecp/seq_spectrum.hpp"

namespace spikecp {

enum class Alternative { kNull, kAlt1, kAlt2, kAlt3 };

std::string to_string(Alternative a);
/// Accepts "null", "alt1", "alt2", "alt3"; throws SpecError otherwise.
Alternative parse_alternative(const std::string& name);

/// alpha_3 = 2 + sqrt(y / t0), alpha_2 = alpha_3 + 3, alpha_1 = alpha_2 + 10.
std::array<double, 3> default_spikes(double y, double t0);

struct ScenarioSpec {
  std::size_t n = 200;
  std::size_t p = 100;
  double t0 = 0.1;
  double t_star = 0.6;
  Alternative alternative = Alternative::kNull;
  double delta = 0.0;
  std::vector<double> spikes;  ///< empty: default_spikes(p / n, t0)
  std::size_t replicates = 500;
  std::uint64_t seed = 1;

  double y() const;
  std::vector<double> alphas() const;
  /// Spiked-block variances after the change point.
  std::vector<double> shifted_alphas() const;
  void validate() const;
  std::uint64_t digest() const;
};

/// Desk scale: n = 200, p = 100, 500 replicates. Full scale: n = 400,
/// p = 200, 2000 replicates.
ScenarioSpec desk_scenario();
ScenarioSpec full_scenario();

/// n x (M + p) Gaussian sample. Rows after floor(n t*) use the shifted
/// spikes; noise coordinates are standard normal.
DataMatrix generate(const ScenarioSpec& scenario, Philox4x32& rng);
/// Replicate r of a scenario. Streams do not depend on the alternative or
/// delta, so alternatives share their underlying normals.
DataMatrix generate(const ScenarioSpec& scenario, std::size_t replicate);
/// Independent null-law sample of `size` rows for replicate r.
DataMatrix generate_initial(const ScenarioSpec& scenario, std::size_t replicate,
                            std::size_t size);

enum class TestMode { kKnown, kEstimated };

struct ExperimentOptions {
  TestMode mode = TestMode::kKnown;
  double level = 0.05;
  std::size_t grid_points = kDefaultGridPoints;
  std::size_t quantile_replicates = 10000;
  /// Plug-in tables are rebuilt per replicate, so they get a lighter budget.
  std::size_t plug_in_grid_points = 100;
  std::size_t plug_in_replicates = 4000;
  std::size_t initial_size = 0;  ///< 0: same as n
  std::size_t threads = 1;
  PathOptions path{};
};

struct PowerCurve {
  Alternative alternative = Alternative::kNull;
  std::vector<double> deltas;
  std::vector<double> rejection_max;
  std::vector<double> rejection_sum;
  ScenarioSpec config;
  std::size_t replicates = 0;
  /// Estimated mode: replicates whose initial-sample estimates leave the
  /// admissible region (a spike not identifiable, or not supercritical at
  /// t0). No test can run on them, so they count as non-rejections.
  std::size_t inadmissible = 0;
};

/// Rejection rates of both tests over `scenario.replicates` runs for every
/// (alternative, delta). One curve per alternative, in input order.
std::vector<PowerCurve> level_and_power(const ScenarioSpec& scenario,
                                        const std::vector<Alternative>& alternatives,
                                        const std::vector<double>& deltas,
                                        const ExperimentOptions& options);

enum class Statistic { kMax, kSum };

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 edges
  std::vector<std::size_t> counts;
  std::vector<double> values;  ///< log statistics per replicate
};

/// Histogram of log M_n (or log S_n) under the scenario, known spikes.
Histogram histogram_experiment(const ScenarioSpec& scenario, Statistic which,
                               std::size_t bins, const ExperimentOptions& options);

/// Equal-width bins over [min, max]; a constant sample fills one bin.
Histogram make_histogram(std::vector<double> values, std::size_t bins);

struct KernelValidationRow {
  std::size_t k = 0;  ///< 1-based
  double s = 0.0;
  double t = 0.0;
  double empirical = 0.0;
  double analytic = 0.0;
  double rel_err = 0.0;
};

/// Empirical covariance of sqrt(n)(lambda_{n,k,s} - phi(alpha_k, y, s)) over
/// replicates against the Gaussian-diagonal kernel, for all pairs of `times`.
std::vector<KernelValidationRow> kernel_validation(const ScenarioSpec& scenario,
                                                   const std::vector<double>& times,
                                                   std::size_t threads);

}  // namespace spikecp
