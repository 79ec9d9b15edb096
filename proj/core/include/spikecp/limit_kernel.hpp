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

// Limiting covariance of the centered spiked-eigenvalue process
// sqrt(n) (lambda_{n,k,t} - phi(alpha_k, y, t)), t in [t0, 1].

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace spikecp {

/// A spike evaluated at one time point: the kernel pairs two of these.
struct SpikeAt {
  double alpha;
  double t;
};

/// Scalar kernel coefficients for a pair of evaluation points (a, b).
/// omega and theta are the limits of n^{-1} sum (I+A_a)_ii (I+A_b)_ii and
/// n^{-1} tr((I+A_a)(I+A_b)) restricted to the common samples.
struct KernelCoefficients {
  double tau = 0.0;
  double psi = 0.0;
  double kappa = 0.0;
  double zeta = 0.0;
  double omega = 0.0;
  double theta = 0.0;
};

/// Closed-form coefficients; omega = tau + psi by construction.
KernelCoefficients coefficients(SpikeAt a, SpikeAt b, double y);

/// Same quantities through the resolvent-trace expansion, using m1 for the
/// diagonal products and m, m_dual recovered from the Stieltjes equation.
/// Only meant as an independent cross-check of coefficients().
KernelCoefficients coefficients_expanded(SpikeAt a, SpikeAt b, double y);

/// Second and fourth moments of the spiked block xi.
class MomentInputs {
 public:
  MomentInputs() = default;

  /// Takes sigma (M x M) and fourth moments laid out as fourth[((i*M+j)*M+m)*M+l].
  MomentInputs(Eigen::MatrixXd sigma, std::vector<double> fourth,
               bool declared_gaussian = false);

  /// Gaussian xi with covariance sigma (Isserlis fourth moments).
  static MomentInputs gaussian(const Eigen::MatrixXd& sigma);
  /// Gaussian xi with independent coordinates of variances `alphas`.
  static MomentInputs diagonal_gaussian(const std::vector<double>& alphas);

  std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(sigma_.rows());
  }
  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  double sigma(std::size_t i, std::size_t j) const;
  double fourth(std::size_t i, std::size_t j, std::size_t m,
                std::size_t l) const;
  const std::vector<double>& fourth_moments() const noexcept {
    return fourth_;
  }
  bool declared_gaussian() const noexcept { return gaussian_; }

  /// Moments of U^T xi for an orthogonal M x M matrix U.
  MomentInputs rotated(const Eigen::MatrixXd& u) const;

  /// Throws SpecError on asymmetric sigma, a sigma eigenvalue below
  /// -tol * max|sigma|, or fourth moments not invariant under index
  /// permutations.
  void validate(double tol = 1e-9) const;

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t m,
                    std::size_t l) const;

  Eigen::MatrixXd sigma_;
  std::vector<double> fourth_;
  bool gaussian_ = false;
};

/// Cov(r_ij at a, r_ml at b) with 0-based coordinate indices:
///   omega (E[xi_i xi_j xi_m xi_l] - S_ij S_ml) + (theta - omega)(S_im S_jl + S_il S_jm).
double r_covariance(std::size_t i, std::size_t j, std::size_t m, std::size_t l,
                    SpikeAt a, SpikeAt b, const MomentInputs& moments,
                    double y);

/// Covariance function of the limiting processes
///   G_{k,t} = r_kk(t) / (1 + y m3(alpha_k, y, t) alpha_k)
/// and of H = G - G', G' an independent copy (twice the G covariance).
/// Spikes are indexed 0..M-1 in the order given; spike k lives on
/// coordinate k of the moment inputs.
class GaussianKernel {
 public:
  GaussianKernel(std::vector<double> alphas, double y, MomentInputs moments,
                 double scale = 1.0);

  /// Cov(process_{k_a}(s), process_{k_b}(t)).
  double covariance(std::size_t k_a, double s, std::size_t k_b,
                    double t) const;

  std::size_t spikes() const noexcept { return alphas_.size(); }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  double y() const noexcept { return y_; }
  double scale() const noexcept { return scale_; }
  const MomentInputs& moments() const noexcept { return moments_; }

  /// FNV-1a digest of every input that determines the kernel.
  std::uint64_t digest() const;

 private:
  double normalizer(std::size_t k, double t) const;

  std::vector<double> alphas_;
  double y_;
  MomentInputs moments_;
  double scale_;

  // Coefficients memoized per (k_a, s, k_b, t); shared by copies.
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Kernel of G for known spikes.
GaussianKernel g_kernel(const std::vector<double>& alphas, double y,
                        const MomentInputs& moments);

/// Kernel of H (plug-in statistics): 2x the G kernel.
GaussianKernel h_kernel(const std::vector<double>& alphas, double y,
                        const MomentInputs& moments);

}  // namespace spikecp
