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

#include "spikecp/gp_quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spikecp/digest.hpp"
#include "spikecp/errors.hpp"
#include "spikecp/parallel.hpp"
#include "spikecp/rng.hpp"

namespace spikecp {

GridSpec::GridSpec(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw SpecError("grid needs at least one point");
  for (std::size_t i = 1; i < points_.size(); ++i)
    if (!(points_[i] > points_[i - 1]))
      throw SpecError("grid points must be strictly increasing");
  if (!(points_.front() > 0.0) || points_.back() != 1.0)
    throw SpecError("grid must start at t0 > 0 and end at 1");
}

GridSpec GridSpec::uniform(double t0, std::size_t count) {
  if (!(t0 > 0.0 && t0 <= 1.0)) throw SpecError("t0 must lie in (0, 1]");
  if (t0 == 1.0) return GridSpec({1.0});
  if (count < 2) throw SpecError("a grid on [t0, 1] needs at least 2 points");
  std::vector<double> pts(count);
  for (std::size_t i = 0; i < count; ++i)
    pts[i] = t0 + (1.0 - t0) * static_cast<double>(i) /
                      static_cast<double>(count - 1);
  pts.back() = 1.0;
  return GridSpec(std::move(pts));
}

GridCovariance build_grid_covariance(const GaussianKernel& kernel,
                                     const GridSpec& grid) {
  const std::size_t spikes = kernel.spikes();
  const std::size_t g = grid.size();
  const auto size = static_cast<Eigen::Index>(spikes * g);
  GridCovariance out;
  out.spikes = spikes;
  out.grid_points = g;
  out.matrix.resize(size, size);
  const auto& t = grid.points();
  for (std::size_t ka = 0; ka < spikes; ++ka)
    for (std::size_t ga = 0; ga < g; ++ga) {
      const auto row = static_cast<Eigen::Index>(ka * g + ga);
      for (std::size_t kb = 0; kb < spikes; ++kb)
        for (std::size_t gb = 0; gb < g; ++gb) {
          const auto col = static_cast<Eigen::Index>(kb * g + gb);
          if (col < row) continue;
          double v;
          try {
            v = kernel.covariance(ka, t[ga], kb, t[gb]);
          } catch (const DomainError& e) {
            std::ostringstream os;
            os << "kernel evaluation failed at (k=" << ka + 1 << ", s=" << t[ga]
               << ", k'=" << kb + 1 << ", t=" << t[gb] << "): " << e.what();
            throw DomainError(os.str());
          }
          if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "kernel is not finite at (k=" << ka + 1 << ", t=" << t[ga]
               << ")";
            throw DomainError(os.str());
          }
          out.matrix(row, col) = v;
          out.matrix(col, row) = v;
        }
    }
  const double maxdiag = out.matrix.diagonal().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix,
                                                    Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  if (out.min_eigenvalue < -1e-8 * maxdiag) {
    std::ostringstream os;
    os << "grid covariance is not positive semidefinite: min eigenvalue "
       << out.min_eigenvalue << " vs max diagonal " << maxdiag;
    throw DomainError(os.str());
  }
  if (out.min_eigenvalue < 0.0) {
    out.jitter = 1e-10 * maxdiag;
    out.matrix.diagonal().array() += out.jitter;
  }
  return out;
}

Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& cov, double rel_tol) {
  const Eigen::Index n = cov.rows();
  if (cov.cols() != n) throw SpecError("covariance must be square");
  Eigen::VectorXd diag = cov.diagonal();
  const double maxdiag = n > 0 ? diag.maxCoeff() : 0.0;
  if (n > 0 && diag.minCoeff() < -1e-8 * std::max(maxdiag, 1e-300))
    throw DomainError("covariance has a negative diagonal entry");
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index rank = 0;
  for (; rank < n; ++rank) {
    Eigen::Index p = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
      if (!done[static_cast<std::size_t>(i)] && diag[i] > best) {
        best = diag[i];
        p = i;
      }
    if (p < 0 || best <= rel_tol * maxdiag) break;
    const double pivot = std::sqrt(best);
    Eigen::VectorXd col = cov.col(p);
    if (rank > 0) col.noalias() -= l.leftCols(rank) * l.row(p).transpose();
    col /= pivot;
    for (Eigen::Index i = 0; i < n; ++i)
      if (done[static_cast<std::size_t>(i)]) col[i] = 0.0;
    col[p] = pivot;
    l.col(rank) = col;
    done[static_cast<std::size_t>(p)] = 1;
    diag -= col.cwiseAbs2();
    diag[p] = 0.0;
  }
  return l.leftCols(rank);
}

double empirical_quantile(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw SpecError("empty sample");
  if (!(level > 0.0 && level < 1.0))
    throw SpecError("quantile level must lie in (0, 1)");
  const double size = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(level * size - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

namespace {

double lookup(const std::vector<double>& levels,
              const std::vector<double>& values, double level,
              const char* which) {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (std::abs(levels[i] - level) <= 1e-12) return values.at(i);
  std::ostringstream os;
  os << "quantile table has no " << which << " entry for level " << level;
  throw SpecError(os.str());
}

double tail_fraction(const std::vector<double>& sorted, double statistic) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), statistic);
  return static_cast<double>(sorted.end() - it) /
         static_cast<double>(sorted.size());
}

}  // namespace

double QuantileTable::critical_max(double level) const {
  return lookup(levels, q_max, level, "max");
}

double QuantileTable::critical_sum(double level) const {
  return lookup(levels, q_sum, level, "sum");
}

double QuantileTable::p_value_max(double statistic) const {
  return tail_fraction(samples_max, statistic);
}

double QuantileTable::p_value_sum(double statistic) const {
  return tail_fraction(samples_sum, statistic);
}

QuantileTable simulate_sup_quantiles(const GridCovariance& cov,
                                     const std::vector<double>& levels,
                                     const SimulationOptions& options) {
  if (options.replicates < 1) throw SpecError("replicates must be >= 1");
  if (levels.empty()) throw SpecError("at least one level is required");
  for (double level : levels)
    if (!(level > 0.0 && level < 1.0))
      throw SpecError("levels must lie in (0, 1)");
  const std::size_t g = cov.grid_points;
  const std::size_t spikes = cov.spikes;
  if (static_cast<std::size_t>(cov.matrix.rows()) != g * spikes)
    throw SpecError("grid covariance shape does not match its metadata");

  const Eigen::MatrixXd factor = pivoted_cholesky(cov.matrix);
  const Eigen::Index rank = factor.cols();
  const std::size_t batch = std::max<std::size_t>(1, options.batch);
  const std::size_t chunks = (options.replicates + batch - 1) / batch;

  std::vector<double> sup_max(options.replicates);
  std::vector<double> sup_sum(options.replicates);
  parallel_for(chunks, options.threads, [&](std::size_t chunk) {
    const std::size_t begin = chunk * batch;
    const std::size_t end = std::min(options.replicates, begin + batch);
    const auto width = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXd z(rank, width);
    for (Eigen::Index c = 0; c < width; ++c) {
      Philox4x32 rng(options.seed,
                     stream_id(0x67707175ull, begin + static_cast<std::size_t>(c)));
      for (Eigen::Index i = 0; i < rank; ++i) z(i, c) = rng.normal();
    }
    const Eigen::MatrixXd x = factor * z;
    for (Eigen::Index c = 0; c < width; ++c) {
      double best = 0.0;
      double best_sum = 0.0;
      for (std::size_t gi = 0; gi < g; ++gi) {
        double sum = 0.0;
        for (std::size_t k = 0; k < spikes; ++k) {
          const double v = x(static_cast<Eigen::Index>(k * g + gi), c);
          const double sq = v * v;
          sum += sq;
          best = std::max(best, sq);
        }
        best_sum = std::max(best_sum, sum);
      }
      sup_max[begin + static_cast<std::size_t>(c)] = best;
      sup_sum[begin + static_cast<std::size_t>(c)] = best_sum;
    }
  });

  std::sort(sup_max.begin(), sup_max.end());
  std::sort(sup_sum.begin(), sup_sum.end());
  QuantileTable table;
  table.levels = levels;
  for (double level : levels) {
    table.q_max.push_back(empirical_quantile(sup_max, level));
    table.q_sum.push_back(empirical_quantile(sup_sum, level));
  }
  table.replicates = options.replicates;
  table.seed = options.seed;
  table.grid_points = g;
  table.spikes = spikes;
  table.samples_max = std::move(sup_max);
  table.samples_sum = std::move(sup_sum);
  return table;
}

QuantileTable quantile_table(const GaussianKernel& kernel,
                             const GridSpec& grid,
                             const std::vector<double>& levels,
                             const SimulationOptions& options) {
  const GridCovariance cov = build_grid_covariance(kernel, grid);
  QuantileTable table = simulate_sup_quantiles(cov, levels, options);
  table.kernel_hash = to_hex(kernel.digest());
  table.process = kernel.scale() == 1.0 ? "G" : "H";
  table.t0 = grid.t0();
  return table;
}

}  // namespace spikecp
