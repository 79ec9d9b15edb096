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

#include "spikecp/seq_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spikecp/errors.hpp"
#include "spikecp/mp_analytics.hpp"
#include "spikecp/rng.hpp"

namespace spikecp {
namespace {

constexpr std::size_t kDenseCutoff = 64;

std::vector<double> top_of(const Eigen::VectorXd& ascending, std::size_t k) {
  std::vector<double> out(k, 0.0);
  const auto size = static_cast<std::size_t>(ascending.size());
  for (std::size_t i = 0; i < k && i < size; ++i)
    out[i] = ascending[static_cast<Eigen::Index>(size - 1 - i)];
  return out;
}

// Orthonormalizes the columns of `block` against `basis` (two passes of
// classical Gram-Schmidt) and among themselves; drops dependent columns.
Eigen::MatrixXd orthonormal_extension(const Eigen::MatrixXd& basis,
                                      Eigen::MatrixXd block) {
  const double drop = 1e-10;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    auto col = block.col(j);
    const double original = col.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) col -= basis * (basis.transpose() * col);
      for (Eigen::Index i : keep) col -= block.col(i) * block.col(i).dot(col);
    }
    const double norm = col.norm();
    if (norm <= drop * original) continue;
    col /= norm;
    keep.push_back(j);
  }
  Eigen::MatrixXd out(block.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = block.col(keep[i]);
  return out;
}

void validate_data(const DataMatrix& data, double t0, std::size_t k) {
  if (data.rows() < 2 || data.cols() < 2) {
    std::ostringstream os;
    os << "data must have at least 2 rows and 2 columns, got " << data.rows()
       << " x " << data.cols();
    throw SpecError(os.str());
  }
  if (!data.allFinite()) throw SpecError("data contains non-finite entries");
  if (!(t0 > 0.0 && t0 <= 1.0)) {
    std::ostringstream os;
    os << "t0 must lie in (0, 1], got " << t0;
    throw SpecError(os.str());
  }
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  if (k < 1 || k > std::min(n, d)) {
    std::ostringstream os;
    os << "number of tracked eigenvalues " << k << " must lie in [1, "
       << std::min(n, d) << "]";
    throw SpecError(os.str());
  }
  if (first_jump(n, t0) < k) {
    std::ostringstream os;
    os << "floor(n t0) = " << first_jump(n, t0) << " is smaller than the "
       << k << " tracked eigenvalues";
    throw SpecError(os.str());
  }
}

}  // namespace

EigenPath::EigenPath(std::size_t n, std::size_t first_index, std::size_t k,
                     double t0, std::vector<double> values)
    : n_(n), first_(first_index), k_(k), t0_(t0), values_(std::move(values)) {
  if (first_ > n_ || values_.size() != (n_ - first_ + 1) * k_)
    throw SpecError("eigen path storage does not match its index range");
}

std::span<const double> EigenPath::at(std::size_t m) const {
  if (m < first_ || m > n_) {
    std::ostringstream os;
    os << "jump index " << m << " outside [" << first_ << ", " << n_ << "]";
    throw SpecError(os.str());
  }
  return {values_.data() + (m - first_) * k_, k_};
}

std::size_t first_jump(std::size_t n, double t0) {
  const double scaled = static_cast<double>(n) * t0;
  auto m = static_cast<std::size_t>(std::floor(scaled));
  // n * t0 that lands within rounding of an integer counts as that integer.
  if (std::abs(scaled - std::round(scaled)) < 1e-9 * std::max(1.0, scaled))
    m = static_cast<std::size_t>(std::round(scaled));
  return m;
}

std::vector<double> top_eigenvalues(const DataMatrix& data, std::size_t m,
                                    std::size_t k) {
  const auto n = static_cast<double>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  if (m < 1 || m > static_cast<std::size_t>(data.rows()))
    throw SpecError("sample count out of range");
  const auto rows = data.topRows(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd small;
  if (m < d) {
    small = rows * rows.transpose() / n;
  } else {
    small = rows.transpose() * rows / n;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small,
                                                    Eigen::EigenvaluesOnly);
  return top_of(es.eigenvalues(), k);
}

KrylovResult krylov_top(const Eigen::MatrixXd& matrix,
                        const Eigen::MatrixXd& start, std::size_t k,
                        double residual_tolerance,
                        std::size_t max_iterations) {
  const Eigen::Index d = matrix.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  const Eigen::Index bb = std::min<Eigen::Index>(d, kk);
  const Eigen::Index max_basis = std::min<Eigen::Index>(d, 3 * bb + 3);
  // Ritz vectors kept on restart; keeping more than K helps when
  // lambda_K and lambda_{K+1} are nearly tied.
  const Eigen::Index keep = std::min<Eigen::Index>(d, bb + 2);

  Eigen::MatrixXd q = orthonormal_extension(Eigen::MatrixXd(d, 0), start);
  if (q.cols() < bb) {
    // Pad a rank-deficient start with deterministic pseudo-random directions.
    Philox4x32 rng(0x5eed, static_cast<std::uint64_t>(d));
    Eigen::MatrixXd extra(d, bb - q.cols() + 1);
    for (Eigen::Index j = 0; j < extra.cols(); ++j)
      for (Eigen::Index i = 0; i < d; ++i) extra(i, j) = rng.normal();
    Eigen::MatrixXd more = orthonormal_extension(q, extra);
    Eigen::MatrixXd joined(d, q.cols() + more.cols());
    joined << q, more;
    q = std::move(joined);
  }
  Eigen::MatrixXd aq = matrix * q;

  KrylovResult result;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    Eigen::MatrixXd projected = q.transpose() * aq;
    projected = 0.5 * (projected + projected.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected);
    const Eigen::Index c = q.cols();
    const Eigen::Index take = std::min(bb, c);
    Eigen::MatrixXd y(c, take);
    Eigen::VectorXd theta(take);
    for (Eigen::Index i = 0; i < take; ++i) {
      y.col(i) = es.eigenvectors().col(c - 1 - i);
      theta[i] = es.eigenvalues()[c - 1 - i];
    }
    Eigen::MatrixXd u = q * y;
    Eigen::MatrixXd au = aq * y;
    Eigen::MatrixXd residual = au - u * theta.asDiagonal();

    const double scale = std::max(std::abs(theta[0]), 1e-300);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < std::min(kk, take); ++i)
      worst = std::max(worst, residual.col(i).norm());
    result.iterations = iter + 1;
    const bool enough_basis = c >= std::min<Eigen::Index>(d, kk + 1);
    if ((take >= kk && enough_basis && worst <= residual_tolerance * scale) || c == d) {
      // c == d: the whole space is spanned and Rayleigh-Ritz is exact.
      result.values = theta.head(std::min(kk, take));
      result.vectors = u;
      return result;
    }

    if (c + take > max_basis) {
      // Thick restart on the leading Ritz vectors.
      const Eigen::Index kept = std::min(keep, c);
      const Eigen::MatrixXd w = es.eigenvectors().rightCols(kept).rowwise().reverse();
      q = (q * w).eval();
      aq = (aq * w).eval();
    }
    Eigen::MatrixXd z = orthonormal_extension(q, residual.leftCols(std::min(kk, take)));
    if (z.cols() == 0) {
      result.values = theta.head(std::min(kk, take));
      result.vectors = u;
      return result;
    }
    Eigen::MatrixXd az = matrix * z;
    Eigen::MatrixXd q_next(d, q.cols() + z.cols());
    q_next << q, z;
    Eigen::MatrixXd aq_next(d, q.cols() + z.cols());
    aq_next << aq, az;
    q = std::move(q_next);
    aq = std::move(aq_next);
  }
  std::ostringstream os;
  os << "block Krylov iteration did not converge in " << max_iterations
     << " iterations";
  throw ConvergenceError(os.str());
}

namespace {

// Dense fallback for the rare jump where Krylov stalls.
KrylovResult dense_top(const Eigen::MatrixXd& cov, std::size_t k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const auto kk = static_cast<Eigen::Index>(k);
  KrylovResult r;
  r.values = es.eigenvalues().tail(kk).reverse();
  r.vectors = es.eigenvectors().rightCols(kk).rowwise().reverse();
  return r;
}

KrylovResult top_or_dense(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& start,
                          std::size_t k, double tol, std::size_t max_iterations) {
  try {
    return krylov_top(cov, start, k, tol, max_iterations);
  } catch (const ConvergenceError&) {
    return dense_top(cov, k);
  }
}

}  // namespace

EigenPath eigen_path(const DataMatrix& data, double t0, std::size_t k,
                     const PathOptions& options) {
  validate_data(data, t0, k);
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t first = first_jump(n, t0);

  EigenSolver solver = options.solver;
  if (solver == EigenSolver::kAuto)
    solver = d <= kDenseCutoff ? EigenSolver::kDense : EigenSolver::kKrylov;

  std::vector<double> values;
  values.reserve((n - first + 1) * k);

  if (solver == EigenSolver::kDense) {
    for (std::size_t m = first; m <= n; ++m) {
      const auto top = top_eigenvalues(data, m, k);
      values.insert(values.end(), top.begin(), top.end());
    }
    return EigenPath(n, first, k, t0, std::move(values));
  }

  const auto rows = data.topRows(static_cast<Eigen::Index>(first));
  Eigen::MatrixXd cov = rows.transpose() * rows * inv_n;

  // Cold start from the most recent observations (they span the range of S).
  const Eigen::Index start_cols =
      static_cast<Eigen::Index>(std::min(first, 2 * k + 2));
  Eigen::MatrixXd start =
      data.middleRows(static_cast<Eigen::Index>(first) - start_cols, start_cols)
          .transpose();
  KrylovResult current = top_or_dense(cov, start, k, options.residual_tolerance,
                                      options.max_iterations * 4);
  for (std::size_t i = 0; i < k; ++i) values.push_back(current.values[static_cast<Eigen::Index>(i)]);

  Eigen::MatrixXd warm(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k + 1));
  for (std::size_t m = first + 1; m <= n; ++m) {
    const Eigen::VectorXd x = data.row(static_cast<Eigen::Index>(m - 1)).transpose();
    cov.noalias() += x * (x.transpose() * inv_n);
    warm << current.vectors, x;
    current = top_or_dense(cov, warm, k, options.residual_tolerance,
                           options.max_iterations);
    for (std::size_t i = 0; i < k; ++i) values.push_back(current.values[static_cast<Eigen::Index>(i)]);
  }
  return EigenPath(n, first, k, t0, std::move(values));
}

namespace {

struct SupTracker {
  explicit SupTracker(std::size_t spikes)
      : per_spike(spikes, -1.0), per_spike_argmax(spikes, 0.0) {}

  void visit(double t, std::span<const double> squared) {
    double sum = 0.0;
    for (std::size_t k = 0; k < squared.size(); ++k) {
      sum += squared[k];
      if (squared[k] > per_spike[k]) {
        per_spike[k] = squared[k];
        per_spike_argmax[k] = t;
      }
    }
    if (sum > sum_value) {
      sum_value = sum;
      sum_argmax = t;
    }
  }

  SupResult finish() const {
    SupResult r;
    r.per_spike = per_spike;
    r.per_spike_argmax = per_spike_argmax;
    r.sum_statistic = sum_value;
    r.sum_argmax = sum_argmax;
    r.max_statistic = -1.0;
    for (std::size_t k = 0; k < per_spike.size(); ++k) {
      // Ties between spikes go to the earlier time, then the lower index.
      if (per_spike[k] > r.max_statistic ||
          (per_spike[k] == r.max_statistic &&
           per_spike_argmax[k] < r.max_argmax)) {
        r.max_statistic = per_spike[k];
        r.max_argmax = per_spike_argmax[k];
        r.max_spike = k;
      }
    }
    return r;
  }

  std::vector<double> per_spike;
  std::vector<double> per_spike_argmax;
  double sum_value = -1.0;
  double sum_argmax = 0.0;
};

}  // namespace

SupResult centered_sup(const EigenPath& path, std::span<const double> alphas,
                       double y_n) {
  if (path.jumps() == 0 || path.values().empty())
    throw SpecError("empty eigen path");
  const std::size_t spikes = alphas.size();
  if (spikes == 0 || spikes > path.tracked()) {
    std::ostringstream os;
    os << "path tracks " << path.tracked() << " eigenvalues but " << spikes
       << " spikes were given";
    throw SpecError(os.str());
  }
  const double n = static_cast<double>(path.n());
  SupTracker tracker(spikes);
  std::vector<double> squared(spikes);

  auto visit = [&](double t, std::span<const double> lambda) {
    for (std::size_t k = 0; k < spikes; ++k) {
      const double dev = lambda[k] - phi_n(alphas[k], y_n, t);
      squared[k] = n * dev * dev;
    }
    tracker.visit(t, squared);
  };

  for (std::size_t m = path.first_index(); m <= path.n(); ++m) {
    const auto lambda = path.at(m);
    const double left = std::max(static_cast<double>(m) / n, path.t0());
    visit(left, lambda);
    if (m < path.n()) visit(static_cast<double>(m + 1) / n, lambda);
  }
  return tracker.finish();
}

SupResult paired_sup(const EigenPath& path, const EigenPath& baseline,
                     std::size_t spikes) {
  if (path.jumps() == 0 || baseline.jumps() == 0)
    throw SpecError("empty eigen path");
  if (spikes == 0 || spikes > path.tracked() || spikes > baseline.tracked())
    throw SpecError("paths track fewer eigenvalues than requested spikes");
  if (path.t0() != baseline.t0())
    throw SpecError("paths were computed with different t0");

  const std::size_t n = path.n();
  const std::size_t big_n = baseline.n();
  const double scale = static_cast<double>(n);
  SupTracker tracker(spikes);
  std::vector<double> squared(spikes);

  auto visit = [&](double t, std::size_t m, std::size_t j) {
    const auto a = path.at(m);
    const auto b = baseline.at(j);
    for (std::size_t k = 0; k < spikes; ++k) {
      const double dev = a[k] - b[k];
      squared[k] = scale * dev * dev;
    }
    tracker.visit(t, squared);
  };

  // Merge the breakpoints m/n and j/N (exact integer comparisons).
  std::size_t m = path.first_index();
  std::size_t j = baseline.first_index();
  visit(path.t0(), m, j);
  std::size_t next_m = m + 1;
  std::size_t next_j = j + 1;
  while (next_m <= n || next_j <= big_n) {
    // Compare next_m / n with next_j / N.
    const bool m_first =
        next_j > big_n || (next_m <= n && next_m * big_n <= next_j * n);
    const bool j_first =
        next_m > n || (next_j <= big_n && next_j * n <= next_m * big_n);
    double t;
    if (m_first) {
      t = static_cast<double>(next_m) / static_cast<double>(n);
      m = next_m++;
    } else {
      t = static_cast<double>(next_j) / static_cast<double>(big_n);
    }
    if (j_first) j = next_j++;
    visit(t, m, j);
  }
  return tracker.finish();
}

}  // namespace spikecp
