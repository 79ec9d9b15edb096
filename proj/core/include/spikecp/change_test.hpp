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

// Max-type and sum-type change-point tests for the spiked eigenvalues, with
// either a known baseline or one estimated from an independent initial
// sample.

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spikecp/gp_quantile.hpp"
#include "spikecp/limit_kernel.hpp"
#include "spikecp/seq_spectrum.hpp"

namespace spikecp {

/// Baseline population description for the known-spike test.
struct ModelSpec {
  std::vector<double> alphas;  ///< strictly decreasing spikes of Sigma_0
  double y = 0.5;              ///< aspect ratio p / n used by the kernel
  double t0 = 0.1;
  /// Distribution of the spiked block; Gaussian with diag(alphas) if unset.
  std::optional<MomentInputs> moments;

  std::size_t spikes() const noexcept { return alphas.size(); }
  MomentInputs effective_moments() const;
  /// Throws SpecError / DomainError naming the failing constraint.
  void validate() const;
};

struct TestReport {
  std::string mode;  ///< "known" or "estimated"
  double statistic_max = 0.0;
  double statistic_sum = 0.0;
  double critical_max = 0.0;
  double critical_sum = 0.0;
  bool reject_max = false;
  bool reject_sum = false;
  double level = 0.05;        ///< significance level; quantile at 1 - level
  double argmax_t = 0.0;      ///< where the max-type sup is attained
  std::size_t argmax_spike = 0;  ///< 1-based
  double argmax_t_sum = 0.0;
  double p_value_max = 0.0;   ///< Monte-Carlo tail fraction (NaN if unknown)
  double p_value_sum = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t spikes = 0;
  double t0 = 0.0;
  std::vector<double> alphas;  ///< baseline or estimated spikes
  std::string kernel_hash;
  std::size_t quantile_replicates = 0;
  std::uint64_t seed = 0;
  std::string data_digest;
  std::string initial_digest;  ///< estimated mode only
  std::map<std::string, std::string> config;  ///< caller-supplied echo
};

/// G kernel of a validated spec.
GaussianKernel known_kernel(const ModelSpec& spec);

/// Known-spike test. `quantiles` must come from known_kernel(spec) (checked
/// through the kernel hash) and contain the confidence level 1 - `level`.
TestReport test_known(const DataMatrix& data, const ModelSpec& spec,
                      double level, const QuantileTable& quantiles,
                      const PathOptions& path_options = {});

/// Spikes from the top eigenvalues of the full initial sample, by inverting
/// the bias map with y_N = (d - M) / N. IdentifiabilityError names the spike.
std::vector<double> estimate_spikes(const DataMatrix& initial, std::size_t m);

/// Empirical second and fourth moments of the first M coordinates.
MomentInputs estimate_moments(const DataMatrix& initial, std::size_t m);

struct InitialSampleSummary {
  EigenPath lambda0_path;
  std::vector<double> alpha_hats;
  Eigen::MatrixXd sigma_hat;
  MomentInputs moments_hat;
  std::vector<double> m3_hat;  ///< m_3 at the observed top eigenvalues
  std::size_t sample_size = 0;
  double y_n = 0.0;
};

InitialSampleSummary estimate_kernel_inputs(const DataMatrix& initial,
                                            std::size_t m, double t0,
                                            const PathOptions& path_options = {});

/// H kernel from estimated inputs, with the moments expressed in the
/// eigenbasis of the estimated spiked-block covariance.
GaussianKernel plug_in_kernel(const InitialSampleSummary& summary, double y);

struct EstimatedTestOptions {
  double t0 = 0.1;
  double level = 0.05;
  std::size_t grid_points = kDefaultGridPoints;
  SimulationOptions simulation{};
  PathOptions path{};
};

/// Estimated-baseline test of `data` against an independent `initial`
/// sample with the same number of coordinates.
TestReport test_estimated(const DataMatrix& data, const DataMatrix& initial,
                          std::size_t m, const EstimatedTestOptions& options);

/// Same, reusing a summary and a plug-in quantile table.
TestReport test_estimated(const DataMatrix& data,
                          const InitialSampleSummary& summary,
                          const QuantileTable& quantiles, double level,
                          const PathOptions& path_options = {});

/// FNV-1a digest of the raw matrix contents and shape.
std::string matrix_digest(const DataMatrix& data);

}  // namespace spikecp
