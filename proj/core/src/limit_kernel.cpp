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

#include "spikecp/limit_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "spikecp/digest.hpp"
#include "spikecp/errors.hpp"
#include "spikecp/mp_analytics.hpp"

namespace spikecp {
namespace {

// Transforms at one evaluation point.
struct PointTransforms {
  double lambda;
  double m;
  double m_dual;
};

PointTransforms closed_form(SpikeAt p, double y) {
  return {phi(p.alpha, y, p.t), m_stieltjes(p.alpha, y, p.t),
          m_dual(p.alpha, y, p.t)};
}

// Root of lambda y m^2 + (lambda + y - t) m + 1 = 0 that is the Stieltjes
// transform outside the support (the one vanishing as lambda -> infinity).
double stieltjes_root(double lambda, double y, double t) {
  const double b = lambda + y - t;
  const double disc = b * b - 4.0 * lambda * y;
  if (disc < 0.0) throw DomainError("evaluation point lies inside the bulk");
  const double q = b + std::copysign(std::sqrt(disc), b);
  if (q == 0.0) throw DomainError("degenerate Stieltjes equation");
  return -2.0 / q;
}

KernelCoefficients assemble(const PointTransforms& a, double ta,
                            const PointTransforms& b, double tb, double y,
                            double psi) {
  const double u = std::min(ta, tb);
  KernelCoefficients c;
  c.tau = u - u * y *
                  ((1.0 + b.lambda * b.m) / tb + (1.0 + a.lambda * a.m) / ta);
  c.psi = psi;
  const double cross = a.lambda * b.lambda * a.m_dual * b.m_dual * a.m * b.m;
  const double kappa_den = 1.0 - u * y * cross;
  if (kappa_den == 0.0) throw DomainError("kappa denominator vanishes");
  c.kappa = u * y * a.m * b.m / kappa_den;
  c.zeta = 1.0 + y * a.lambda * a.m_dual * a.m + y * b.lambda * b.m_dual * b.m +
           y * y * cross;
  c.omega = c.tau + c.psi;
  c.theta = c.tau + u * c.zeta * (y * y * a.m * b.m + c.kappa * c.zeta);
  return c;
}

}  // namespace

KernelCoefficients coefficients(SpikeAt a, SpikeAt b, double y) {
  const PointTransforms pa = closed_form(a, y);
  const PointTransforms pb = closed_form(b, y);
  const double u = std::min(a.t, b.t);
  const double psi_den =
      pa.lambda * pb.lambda * (1.0 + y * pa.m) * (1.0 + y * pb.m);
  if (psi_den == 0.0) throw DomainError("psi denominator vanishes");
  const double psi =
      u * y * y * pa.lambda * pa.m * pb.lambda * pb.m / psi_den;
  return assemble(pa, a.t, pb, b.t, y, psi);
}

KernelCoefficients coefficients_expanded(SpikeAt a, SpikeAt b, double y) {
  require_supercritical(a.alpha, y, a.t);
  require_supercritical(b.alpha, y, b.t);
  auto point = [y](SpikeAt p) {
    const double lambda = phi(p.alpha, y, p.t);
    const double m = stieltjes_root(lambda, y, p.t);
    const double ratio = y / p.t;
    return PointTransforms{lambda, m, -(1.0 - ratio) / lambda + ratio * m};
  };
  const PointTransforms pa = point(a);
  const PointTransforms pb = point(b);
  const double u = std::min(a.t, b.t);
  const double one_a = 1.0 + m1(a.alpha, y, a.t);
  const double one_b = 1.0 + m1(b.alpha, y, b.t);
  const double den = (pa.lambda - y * one_a) * (pb.lambda - y * one_b);
  if (den == 0.0) throw DomainError("expanded psi denominator vanishes");
  const double psi = u * y * y * one_a * one_b / den;
  return assemble(pa, a.t, pb, b.t, y, psi);
}

MomentInputs::MomentInputs(Eigen::MatrixXd sigma, std::vector<double> fourth,
                           bool declared_gaussian)
    : sigma_(std::move(sigma)),
      fourth_(std::move(fourth)),
      gaussian_(declared_gaussian) {
  if (sigma_.rows() != sigma_.cols())
    throw SpecError("sigma must be square");
  const std::size_t m = dimension();
  if (fourth_.size() != m * m * m * m) {
    std::ostringstream os;
    os << "fourth moments need " << m * m * m * m << " entries, got "
       << fourth_.size();
    throw SpecError(os.str());
  }
}

MomentInputs MomentInputs::gaussian(const Eigen::MatrixXd& sigma) {
  const auto m = static_cast<std::size_t>(sigma.rows());
  std::vector<double> fourth(m * m * m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l)
          fourth[((i * m + j) * m + k) * m + l] =
              sigma(i, j) * sigma(k, l) + sigma(i, k) * sigma(j, l) +
              sigma(i, l) * sigma(j, k);
  return MomentInputs(sigma, std::move(fourth), true);
}

MomentInputs MomentInputs::diagonal_gaussian(const std::vector<double>& alphas) {
  const Eigen::VectorXd diag =
      Eigen::Map<const Eigen::VectorXd>(alphas.data(),
                                        static_cast<Eigen::Index>(alphas.size()));
  return gaussian(diag.asDiagonal().toDenseMatrix());
}

std::size_t MomentInputs::index(std::size_t i, std::size_t j, std::size_t m,
                                std::size_t l) const {
  const std::size_t d = dimension();
  if (i >= d || j >= d || m >= d || l >= d) {
    std::ostringstream os;
    os << "moment index (" << i << ", " << j << ", " << m << ", " << l
       << ") out of range for dimension " << d;
    throw SpecError(os.str());
  }
  return ((i * d + j) * d + m) * d + l;
}

double MomentInputs::sigma(std::size_t i, std::size_t j) const {
  if (i >= dimension() || j >= dimension())
    throw SpecError("sigma index out of range");
  return sigma_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double MomentInputs::fourth(std::size_t i, std::size_t j, std::size_t m,
                            std::size_t l) const {
  return fourth_[index(i, j, m, l)];
}

MomentInputs MomentInputs::rotated(const Eigen::MatrixXd& u) const {
  const std::size_t d = dimension();
  if (static_cast<std::size_t>(u.rows()) != d ||
      static_cast<std::size_t>(u.cols()) != d)
    throw SpecError("rotation must be M x M");
  // Contract one index at a time: each pass maps the leading index through
  // U^T and cycles it to the back.
  std::vector<double> cur = fourth_;
  std::vector<double> next(cur.size());
  for (int pass = 0; pass < 4; ++pass) {
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t rest = 0; rest < d * d * d; ++rest) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i)
          acc += u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) *
                 cur[i * d * d * d + rest];
        next[rest * d + a] = acc;
      }
    std::swap(cur, next);
  }
  return MomentInputs(u.transpose() * sigma_ * u, std::move(cur), gaussian_);
}

void MomentInputs::validate(double tol) const {
  const std::size_t d = dimension();
  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw SpecError("sigma is not symmetric");
  if (d > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_,
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * scale)
      throw SpecError("sigma is not positive semidefinite");
  }
  double fscale = 1.0;
  for (double v : fourth_) fscale = std::max(fscale, std::abs(v));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t m = 0; m < d; ++m)
        for (std::size_t l = 0; l < d; ++l) {
          const double v = fourth(i, j, m, l);
          for (double w : {fourth(j, i, m, l), fourth(m, j, i, l),
                           fourth(l, j, m, i), fourth(i, m, j, l),
                           fourth(i, l, m, j), fourth(i, j, l, m)})
            if (std::abs(v - w) > tol * fscale)
              throw SpecError("fourth moments are not permutation symmetric");
        }
}

double r_covariance(std::size_t i, std::size_t j, std::size_t m, std::size_t l,
                    SpikeAt a, SpikeAt b, const MomentInputs& moments,
                    double y) {
  const double fourth = moments.fourth(i, j, m, l);
  const KernelCoefficients c = coefficients(a, b, y);
  const double s_ij = moments.sigma(i, j);
  const double s_ml = moments.sigma(m, l);
  const double pair = moments.sigma(i, m) * moments.sigma(j, l) +
                      moments.sigma(i, l) * moments.sigma(j, m);
  return c.omega * (fourth - s_ij * s_ml) + (c.theta - c.omega) * pair;
}

struct GaussianKernel::Cache {
  std::mutex mutex;
  std::map<std::tuple<std::size_t, double, std::size_t, double>,
           KernelCoefficients>
      entries;
};

GaussianKernel::GaussianKernel(std::vector<double> alphas, double y,
                               MomentInputs moments, double scale)
    : alphas_(std::move(alphas)),
      y_(y),
      moments_(std::move(moments)),
      scale_(scale),
      cache_(std::make_shared<Cache>()) {
  if (alphas_.empty()) throw SpecError("kernel needs at least one spike");
  if (moments_.dimension() != alphas_.size()) {
    std::ostringstream os;
    os << "moment inputs have dimension " << moments_.dimension() << " but "
       << alphas_.size() << " spikes were given";
    throw SpecError(os.str());
  }
}

double GaussianKernel::normalizer(std::size_t k, double t) const {
  const double alpha = alphas_[k];
  const double value = 1.0 + y_ * m3(alpha, y_, t) * alpha;
  if (value == 0.0) {
    std::ostringstream os;
    os << "normalizer 1 + y m3 alpha vanishes for spike " << k + 1
       << " at t=" << t;
    throw DomainError(os.str());
  }
  return value;
}

double GaussianKernel::covariance(std::size_t k_a, double s, std::size_t k_b,
                                  double t) const {
  if (k_a >= alphas_.size() || k_b >= alphas_.size())
    throw SpecError("spike index out of range");
  const auto key = std::make_tuple(k_a, s, k_b, t);
  KernelCoefficients c;
  bool found = false;
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->entries.find(key); it != cache_->entries.end()) {
      c = it->second;
      found = true;
    }
  }
  if (!found) {
    c = coefficients({alphas_[k_a], s}, {alphas_[k_b], t}, y_);
    std::lock_guard lock(cache_->mutex);
    cache_->entries.emplace(key, c);
  }
  const double fourth = moments_.fourth(k_a, k_a, k_b, k_b);
  const double s_aa = moments_.sigma(k_a, k_a);
  const double s_bb = moments_.sigma(k_b, k_b);
  const double s_ab = moments_.sigma(k_a, k_b);
  const double r = c.omega * (fourth - s_aa * s_bb) +
                   (c.theta - c.omega) * 2.0 * s_ab * s_ab;
  return scale_ * r / (normalizer(k_a, s) * normalizer(k_b, t));
}

std::uint64_t GaussianKernel::digest() const {
  Fnv1a h;
  h.add(std::string_view("spikecp.kernel.v1"));
  h.add(std::span<const double>(alphas_));
  h.add(y_).add(scale_);
  h.add(std::span<const double>(moments_.sigma().data(),
                                static_cast<std::size_t>(moments_.sigma().size())));
  h.add(std::span<const double>(moments_.fourth_moments()));
  return h.value();
}

GaussianKernel g_kernel(const std::vector<double>& alphas, double y,
                        const MomentInputs& moments) {
  return GaussianKernel(alphas, y, moments, 1.0);
}

GaussianKernel h_kernel(const std::vector<double>& alphas, double y,
                        const MomentInputs& moments) {
  return GaussianKernel(alphas, y, moments, 2.0);
}

}  // namespace spikecp
