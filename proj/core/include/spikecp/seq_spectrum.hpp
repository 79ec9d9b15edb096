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

// Top eigenvalues of the sequential sample covariance
//   S_{n,t} = n^{-1} sum_{i <= floor(nt)} x_i x_i^T,   t in [t0, 1],
// which is a step function of t with jumps at multiples of 1/n.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace spikecp {

/// n observations as rows, d = M + p coordinates as columns.
using DataMatrix = Eigen::MatrixXd;

enum class EigenSolver {
  kAuto,    // dense for d <= 64, Krylov above
  kDense,   // full symmetric eigendecomposition at every jump
  kKrylov,  // block Krylov warm-started from the previous jump
};

struct PathOptions {
  EigenSolver solver = EigenSolver::kAuto;
  /// Krylov stops when every Ritz residual is below tol * top Ritz value.
  /// Eigenvalue errors are quadratic in the residual, so 1e-7 leaves them
  /// near 1e-13 relative on the spiked models used here.
  double residual_tolerance = 1e-7;
  /// Per-jump cap; a jump that hits it is solved densely instead.
  std::size_t max_iterations = 100;
};

/// Top-K eigenvalues of S_{n, m/n} for m = first_index() .. n.
class EigenPath {
 public:
  EigenPath() = default;
  EigenPath(std::size_t n, std::size_t first_index, std::size_t k, double t0,
            std::vector<double> values);

  std::size_t n() const noexcept { return n_; }
  std::size_t first_index() const noexcept { return first_; }
  std::size_t tracked() const noexcept { return k_; }
  double t0() const noexcept { return t0_; }
  std::size_t jumps() const noexcept { return n_ - first_ + 1; }

  /// Eigenvalues at jump index m, sorted descending.
  std::span<const double> at(std::size_t m) const;
  double value(std::size_t m, std::size_t k) const { return at(m)[k]; }

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t n_ = 0;
  std::size_t first_ = 0;
  std::size_t k_ = 0;
  double t0_ = 0.0;
  std::vector<double> values_;
};

/// First jump index floor(n t0); the path is constant on [t0, (first+1)/n).
std::size_t first_jump(std::size_t n, double t0);

/// Path of the top-K eigenvalues. Throws SpecError when K is out of range,
/// t0 is outside (0, 1], or the data has non-finite entries.
EigenPath eigen_path(const DataMatrix& data, double t0, std::size_t k,
                     const PathOptions& options = {});

/// Top-K eigenvalues of S_{n, m/n} computed densely (Gram matrix when m < d).
std::vector<double> top_eigenvalues(const DataMatrix& data, std::size_t m,
                                    std::size_t k);

/// Top-K eigenpairs of a symmetric matrix by block Krylov iteration started
/// from the columns of `start`. Eigenvalues descending; vectors as columns.
struct KrylovResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::size_t iterations = 0;
};
KrylovResult krylov_top(const Eigen::MatrixXd& matrix,
                        const Eigen::MatrixXd& start, std::size_t k,
                        double residual_tolerance = 1e-9,
                        std::size_t max_iterations = 400);

/// Suprema over t in [t0, 1] of squared, n-scaled deviations.
struct SupResult {
  std::vector<double> per_spike;         ///< sup_t n (dev_k(t))^2
  std::vector<double> per_spike_argmax;  ///< smallest maximizing t
  double max_statistic = 0.0;            ///< max over spikes (M_n type)
  double max_argmax = 0.0;
  std::size_t max_spike = 0;             ///< 0-based spike attaining it
  double sum_statistic = 0.0;            ///< sup_t sum_k n dev_k(t)^2 (S_n type)
  double sum_argmax = 0.0;
};

/// Exact sup of n (lambda_{n,k,t} - phi_n(alpha_k, y_n, t))^2. On each
/// [m/n, (m+1)/n) the eigenvalue is constant and phi_n affine in t, so the
/// convex square peaks at an endpoint; the right endpoint enters as a limit.
SupResult centered_sup(const EigenPath& path, std::span<const double> alphas,
                       double y_n);

/// Exact sup of n (lambda_{n,k,t} - lambda0_{N,k,t})^2 with both paths read as
/// step functions; evaluated on the union of their breakpoints in [t0, 1].
SupResult paired_sup(const EigenPath& path, const EigenPath& baseline,
                     std::size_t spikes);

}  // namespace spikecp
