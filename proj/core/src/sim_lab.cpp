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

#include "spikecp/sim_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spikecp/digest.hpp"
#include "spikecp/errors.hpp"
#include "spikecp/mp_analytics.hpp"
#include "spikecp/parallel.hpp"

namespace spikecp {

namespace {

constexpr std::uint64_t kDataTag = 0x64617461;
constexpr std::uint64_t kInitialTag = 0x696e6974;
constexpr std::uint64_t kTableTag = 0x7461626c;

}  // namespace

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::kNull: return "null";
    case Alternative::kAlt1: return "alt1";
    case Alternative::kAlt2: return "alt2";
    case Alternative::kAlt3: return "alt3";
  }
  return "null";
}

Alternative parse_alternative(const std::string& name) {
  if (name == "null") return Alternative::kNull;
  if (name == "alt1") return Alternative::kAlt1;
  if (name == "alt2") return Alternative::kAlt2;
  if (name == "alt3") return Alternative::kAlt3;
  throw SpecError("unknown alternative '" + name + "' (expected null, alt1, alt2 or alt3)");
}

std::array<double, 3> default_spikes(double y, double t0) {
  if (!(y >= 0.0 && y < 1.0)) throw SpecError("y must lie in [0, 1)");
  if (!(t0 > 0.0 && t0 <= 1.0)) throw SpecError("t0 must lie in (0, 1]");
  const double a3 = 2.0 + std::sqrt(y / t0);
  const double a2 = a3 + 3.0;
  return {a2 + 10.0, a2, a3};
}

double ScenarioSpec::y() const {
  return static_cast<double>(p) / static_cast<double>(n);
}

std::vector<double> ScenarioSpec::alphas() const {
  if (!spikes.empty()) return spikes;
  const auto d = default_spikes(y(), t0);
  return {d.begin(), d.end()};
}

std::vector<double> ScenarioSpec::shifted_alphas() const {
  std::vector<double> a = alphas();
  const bool first = alternative == Alternative::kAlt1 || alternative == Alternative::kAlt3;
  const bool second = alternative == Alternative::kAlt2 || alternative == Alternative::kAlt3;
  if (first) a.at(0) += delta;
  if (second) {
    if (a.size() < 2) throw SpecError("alt2 and alt3 need at least two spikes");
    a[1] += delta;
  }
  return a;
}

void ScenarioSpec::validate() const {
  if (n < 2) throw SpecError("n must be at least 2");
  if (p < 1 || p >= n) throw SpecError("p must satisfy 1 <= p < n");
  if (!(t0 > 0.0 && t0 < 1.0)) throw SpecError("t0 must lie in (0, 1)");
  if (!(t_star > t0 && t_star <= 1.0)) throw SpecError("t_star must lie in (t0, 1]");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw SpecError("delta must be finite and >= 0");
  if (replicates < 1) throw SpecError("replicates must be at least 1");
  const auto a = alphas();
  for (std::size_t k = 1; k < a.size(); ++k)
    if (!(a[k] < a[k - 1])) throw SpecError("spikes must be strictly decreasing");
  for (double v : a)
    if (!(v > 0.0)) throw SpecError("spike variances must be positive");
  shifted_alphas();
}

std::uint64_t ScenarioSpec::digest() const {
  Fnv1a h;
  h.add("scenario");
  h.add(static_cast<std::uint64_t>(n)).add(static_cast<std::uint64_t>(p));
  h.add(t0).add(t_star).add(to_string(alternative)).add(delta);
  const auto a = alphas();
  h.add(std::span<const double>(a));
  h.add(static_cast<std::uint64_t>(replicates)).add(seed);
  return h.value();
}

ScenarioSpec desk_scenario() { return ScenarioSpec{}; }

ScenarioSpec full_scenario() {
  ScenarioSpec s;
  s.n = 400;
  s.p = 200;
  s.replicates = 2000;
  return s;
}

namespace {

DataMatrix draw(std::size_t rows, std::size_t p, const std::vector<double>& before,
                const std::vector<double>& after, std::size_t change_row,
                Philox4x32& rng) {
  const std::size_t m = before.size();
  DataMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m + p));
  std::vector<double> sd_before(m), sd_after(m);
  for (std::size_t k = 0; k < m; ++k) {
    sd_before[k] = std::sqrt(before[k]);
    sd_after[k] = std::sqrt(after[k]);
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& sd = i < change_row ? sd_before : sd_after;
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t k = 0; k < m; ++k)
      x(r, static_cast<Eigen::Index>(k)) = sd[k] * rng.normal();
    for (std::size_t j = 0; j < p; ++j)
      x(r, static_cast<Eigen::Index>(m + j)) = rng.normal();
  }
  return x;
}

}  // namespace

DataMatrix generate(const ScenarioSpec& scenario, Philox4x32& rng) {
  scenario.validate();
  // Observations 1..floor(n t*) follow the baseline law.
  const std::size_t change = first_jump(scenario.n, scenario.t_star);
  return draw(scenario.n, scenario.p, scenario.alphas(), scenario.shifted_alphas(),
              change, rng);
}

DataMatrix generate(const ScenarioSpec& scenario, std::size_t replicate) {
  Philox4x32 rng(scenario.seed, stream_id(kDataTag, replicate));
  return generate(scenario, rng);
}

DataMatrix generate_initial(const ScenarioSpec& scenario, std::size_t replicate,
                            std::size_t size) {
  scenario.validate();
  if (size <= scenario.p) throw SpecError("initial sample must have more rows than p");
  Philox4x32 rng(scenario.seed, stream_id(kInitialTag, replicate));
  const auto a = scenario.alphas();
  return draw(size, scenario.p, a, a, size, rng);
}

namespace {

struct Decision {
  bool max = false;
  bool sum = false;
};

ModelSpec model_of(const ScenarioSpec& s) {
  ModelSpec spec;
  spec.alphas = s.alphas();
  spec.y = s.y();
  spec.t0 = s.t0;
  return spec;
}

QuantileTable known_table(const ScenarioSpec& s, const ExperimentOptions& o) {
  SimulationOptions sim;
  sim.replicates = o.quantile_replicates;
  sim.seed = stream_id(kTableTag, s.seed);
  sim.threads = o.threads;
  return quantile_table(known_kernel(model_of(s)), GridSpec::uniform(s.t0, o.grid_points),
                        {1.0 - o.level}, sim);
}

}  // namespace

std::vector<PowerCurve> level_and_power(const ScenarioSpec& scenario,
                                        const std::vector<Alternative>& alternatives,
                                        const std::vector<double>& deltas,
                                        const ExperimentOptions& options) {
  scenario.validate();
  if (alternatives.empty()) throw SpecError("no alternatives requested");
  if (deltas.empty()) throw SpecError("the list of deltas is empty");
  for (double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) throw SpecError("deltas must be finite and >= 0");

  const std::size_t reps = scenario.replicates;
  const std::size_t cells = alternatives.size() * deltas.size();
  const ModelSpec spec = model_of(scenario);
  QuantileTable table;
  if (options.mode == TestMode::kKnown) table = known_table(scenario, options);
  const std::size_t initial_size = options.initial_size ? options.initial_size : scenario.n;

  std::vector<Decision> decisions(reps * cells);
  std::vector<char> inadmissible(reps, 0);
  parallel_for(reps, options.threads, [&](std::size_t r) {
    InitialSampleSummary summary;
    QuantileTable plug_in;
    if (options.mode == TestMode::kEstimated) {
      const DataMatrix initial = generate_initial(scenario, r, initial_size);
      try {
        summary = estimate_kernel_inputs(initial, spec.spikes(), scenario.t0, options.path);
        SimulationOptions sim;
        sim.replicates = options.plug_in_replicates;
        sim.seed = stream_id(kTableTag, scenario.seed, r + 1);
        plug_in = quantile_table(plug_in_kernel(summary, scenario.y()),
                                 GridSpec::uniform(scenario.t0, options.plug_in_grid_points),
                                 {1.0 - options.level}, sim);
      } catch (const DomainError&) {
        // Decisions stay at "not rejected" for every cell.
        inadmissible[r] = 1;
        return;
      }
    }
    bool have_null = false;
    Decision null_decision;
    for (std::size_t a = 0; a < alternatives.size(); ++a)
      for (std::size_t d = 0; d < deltas.size(); ++d) {
        ScenarioSpec s = scenario;
        s.alternative = deltas[d] == 0.0 ? Alternative::kNull : alternatives[a];
        s.delta = s.alternative == Alternative::kNull ? 0.0 : deltas[d];
        Decision out;
        if (s.alternative == Alternative::kNull && have_null) {
          out = null_decision;
        } else {
          const DataMatrix data = generate(s, r);
          const TestReport rep =
              options.mode == TestMode::kKnown
                  ? test_known(data, spec, options.level, table, options.path)
                  : test_estimated(data, summary, plug_in, options.level, options.path);
          out = {rep.reject_max, rep.reject_sum};
          if (s.alternative == Alternative::kNull) {
            have_null = true;
            null_decision = out;
          }
        }
        decisions[r * cells + a * deltas.size() + d] = out;
      }
  });

  std::vector<PowerCurve> curves;
  for (std::size_t a = 0; a < alternatives.size(); ++a) {
    PowerCurve c;
    c.alternative = alternatives[a];
    c.deltas = deltas;
    c.config = scenario;
    c.config.alternative = alternatives[a];
    c.replicates = reps;
    c.inadmissible = static_cast<std::size_t>(
        std::count(inadmissible.begin(), inadmissible.end(), char{1}));
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      std::size_t hits_max = 0, hits_sum = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const Decision& x = decisions[r * cells + a * deltas.size() + d];
        hits_max += x.max;
        hits_sum += x.sum;
      }
      c.rejection_max.push_back(static_cast<double>(hits_max) / static_cast<double>(reps));
      c.rejection_sum.push_back(static_cast<double>(hits_sum) / static_cast<double>(reps));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

Histogram make_histogram(std::vector<double> values, std::size_t bins) {
  if (bins < 1) throw SpecError("histogram needs at least one bin");
  if (values.empty()) throw SpecError("histogram needs at least one value");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("histogram value is not finite");
  Histogram h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  h.counts.assign(bins, 0);
  if (hi == lo) {
    // Constant sample: centre a unit-width range on it.
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + width * static_cast<double>(b));
  h.edges.back() = hi;
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  h.values = std::move(values);
  return h;
}

Histogram histogram_experiment(const ScenarioSpec& scenario, Statistic which,
                               std::size_t bins, const ExperimentOptions& options) {
  scenario.validate();
  const ModelSpec spec = model_of(scenario);
  const std::vector<double> alphas = spec.alphas;
  const double y_n = scenario.y();
  std::vector<double> values(scenario.replicates);
  parallel_for(scenario.replicates, options.threads, [&](std::size_t r) {
    const DataMatrix data = generate(scenario, r);
    const EigenPath path = eigen_path(data, scenario.t0, alphas.size(), options.path);
    const SupResult sup = centered_sup(path, alphas, y_n);
    const double stat = which == Statistic::kMax ? sup.max_statistic : sup.sum_statistic;
    values[r] = std::log(stat);
  });
  return make_histogram(std::move(values), bins);
}

std::vector<KernelValidationRow> kernel_validation(const ScenarioSpec& scenario,
                                                   const std::vector<double>& times,
                                                   std::size_t threads) {
  ScenarioSpec s = scenario;
  s.alternative = Alternative::kNull;
  s.delta = 0.0;
  s.validate();
  if (times.empty()) throw SpecError("no time points given");
  for (double t : times)
    if (!(t >= s.t0 && t <= 1.0)) throw SpecError("time points must lie in [t0, 1]");
  if (s.replicates < 2) throw SpecError("kernel validation needs at least 2 replicates");

  const std::vector<double> alphas = s.alphas();
  const std::size_t m = alphas.size();
  const std::size_t nt = times.size();
  const double y = s.y();
  const double root_n = std::sqrt(static_cast<double>(s.n));
  // dev[r][k][i] flattened.
  std::vector<double> dev(s.replicates * m * nt);
  parallel_for(s.replicates, threads, [&](std::size_t r) {
    const DataMatrix data = generate(s, r);
    for (std::size_t i = 0; i < nt; ++i) {
      const std::size_t rows = first_jump(s.n, times[i]);
      const auto top = top_eigenvalues(data, rows, m);
      for (std::size_t k = 0; k < m; ++k)
        dev[(r * m + k) * nt + i] = root_n * (top[k] - phi(alphas[k], y, times[i]));
    }
  });

  const GaussianKernel kernel = g_kernel(alphas, y, MomentInputs::diagonal_gaussian(alphas));
  const auto reps = static_cast<double>(s.replicates);
  std::vector<KernelValidationRow> rows;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> mean(nt, 0.0);
    for (std::size_t r = 0; r < s.replicates; ++r)
      for (std::size_t i = 0; i < nt; ++i) mean[i] += dev[(r * m + k) * nt + i];
    for (double& v : mean) v /= reps;
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < s.replicates; ++r)
          acc += (dev[(r * m + k) * nt + i] - mean[i]) * (dev[(r * m + k) * nt + j] - mean[j]);
        KernelValidationRow row;
        row.k = k + 1;
        row.s = times[i];
        row.t = times[j];
        row.empirical = acc / (reps - 1.0);
        row.analytic = kernel.covariance(k, times[i], k, times[j]);
        row.rel_err = std::abs(row.empirical - row.analytic) / std::abs(row.analytic);
        rows.push_back(row);
      }
  }
  return rows;
}

}  // namespace spikecp
