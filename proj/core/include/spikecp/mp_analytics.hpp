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

// Marchenko-Pastur quantities for the sequential sample covariance
// S_{n,t} = n^{-1} sum_{i <= nt} x_i x_i^T with noise ratio y = lim p/n.
//
// The noise block of S_{n,t} has limiting spectral law F_{y/t}(x / t), the
// Marchenko-Pastur law with ratio y/t dilated by t. A spike alpha outside the
// phase interval produces a sample eigenvalue converging to
// lambda = phi(alpha, y, t), and all transforms below are evaluated there.

#include <functional>

namespace spikecp {

/// Closed interval [lower, upper].
struct Interval {
  double lower;
  double upper;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
  /// Distance from x to the interval (0 inside).
  double distance(double x) const noexcept;
};

/// Spikes closer than this to the phase interval are rejected.
inline constexpr double kSupercriticalMargin = 1e-6;

/// Subcritical spike interval [1 - sqrt(y/t0), 1 + sqrt(y/t0)].
Interval phase_interval(double y, double t0);

bool is_supercritical(double alpha, double y, double t,
                      double margin = kSupercriticalMargin);

/// Throws DomainError naming alpha when it is within `margin` of the phase
/// interval at (y, t), or when alpha is 0.
void require_supercritical(double alpha, double y, double t,
                           double margin = kSupercriticalMargin);

/// Almost-sure limit of the spiked sample eigenvalue: t*alpha + y*alpha/(alpha-1).
double phi(double alpha, double y, double t);

/// Finite-sample centering t*alpha + y_n*alpha/(alpha-1).
double phi_n(double alpha, double y_n, double t);

/// Supercritical root of phi_n(alpha, y_n, 1) = lambda_obs.
/// Throws DomainError when the observed eigenvalue has no such preimage.
double invert_phi(double lambda_obs, double y_n);

/// m_{1,t}(lambda) = int x / (lambda - x) dF_{y/t}(x / t) at lambda = phi(alpha, y, t).
double m1(double alpha, double y, double t);

/// m_{3,t}(lambda) = int x / (lambda - x)^2 dF_{y/t}(x / t) at lambda = phi(alpha, y, t).
double m3(double alpha, double y, double t);

/// Stieltjes transform int 1 / (x - lambda) dF_{y/t}(x / t) at lambda = phi(alpha, y, t).
double m_stieltjes(double alpha, double y, double t);

/// Companion transform -(1 - y/t)/lambda + (y/t) m at lambda = phi(alpha, y, t).
double m_dual(double alpha, double y, double t);

/// Integral of g against the dilated law F_{y_t}(x / t), including the atom
/// (1 - 1/y_t)^+ at zero. Adaptive Gauss-Kronrod on the substitution
/// x = t (1 + y_t + 2 sqrt(y_t) cos theta), absolute tolerance `tol`.
/// Throws ConvergenceError when the tolerance is not met.
double mp_integral(const std::function<double(double)>& integrand, double y_t,
                   double t, double tol = 1e-9);

}  // namespace spikecp
