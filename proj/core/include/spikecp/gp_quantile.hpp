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

// Critical values for sup-type functionals of the limiting Gaussian
// processes, by simulating them on a time grid.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spikecp/limit_kernel.hpp"

namespace spikecp {

/// Strictly increasing times from t0 to 1.
class GridSpec {
 public:
  explicit GridSpec(std::vector<double> points);

  /// `count` equally spaced points on [t0, 1] (count >= 2, or 1 when t0 = 1).
  static GridSpec uniform(double t0, std::size_t count);

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double t0() const noexcept { return points_.front(); }

 private:
  std::vector<double> points_;
};

inline constexpr std::size_t kDefaultGridPoints = 200;

/// Covariance of (process_k(t))_{k, t} with row index k * |grid| + g.
struct GridCovariance {
  Eigen::MatrixXd matrix;
  std::size_t spikes = 0;
  std::size_t grid_points = 0;
  double min_eigenvalue = 0.0;  ///< before any jitter
  double jitter = 0.0;          ///< ridge added to the diagonal (0 if none)
};

/// Assembles the grid covariance. A slightly negative spectrum
/// (min eigenvalue in (-1e-8 maxdiag, 0)) gets a 1e-10 maxdiag ridge; anything
/// more negative throws DomainError since it points at a kernel defect.
GridCovariance build_grid_covariance(const GaussianKernel& kernel,
                                     const GridSpec& grid);

/// Low-rank factor L with cov ~= L L^T from diagonally pivoted Cholesky,
/// truncated once the remaining diagonal is below rel_tol * maxdiag.
Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& cov,
                                 double rel_tol = 1e-12);

struct QuantileTable {
  std::vector<double> levels;  ///< confidence levels, e.g. 0.95
  std::vector<double> q_max;   ///< quantiles of sup_{k,t} X_k(t)^2
  std::vector<double> q_sum;   ///< quantiles of sup_t sum_k X_k(t)^2
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::string kernel_hash;
  std::string process = "G";  ///< "G" (known spikes) or "H" (plug-in)
  double t0 = 0.0;
  std::size_t grid_points = 0;
  std::size_t spikes = 0;
  /// Simulated sups, sorted ascending; empty when loaded without samples.
  std::vector<double> samples_max;
  std::vector<double> samples_sum;

  /// Quantile stored for `level` (within 1e-12); throws SpecError otherwise.
  double critical_max(double level) const;
  double critical_sum(double level) const;

  /// Fraction of simulated sups >= statistic; NaN without samples.
  double p_value_max(double statistic) const;
  double p_value_sum(double statistic) const;
};

/// Order statistic at ceil(level * size) (1-based) of a sorted sample.
double empirical_quantile(const std::vector<double>& sorted, double level);

struct SimulationOptions {
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t batch = 256;
};

/// Draws replicates of the grid process via a pivoted-Cholesky factor and
/// returns the empirical quantiles of sup X^2 and sup sum X^2. Replicate r
/// uses the counter stream (seed, r), so the table is identical for any
/// thread count.
QuantileTable simulate_sup_quantiles(const GridCovariance& cov,
                                     const std::vector<double>& levels,
                                     const SimulationOptions& options);

/// Kernel -> grid covariance -> simulation, with metadata filled in.
QuantileTable quantile_table(const GaussianKernel& kernel,
                             const GridSpec& grid,
                             const std::vector<double>& levels,
                             const SimulationOptions& options);

}  // namespace spikecp
