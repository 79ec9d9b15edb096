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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "spikecp/errors.hpp"
#include "spikecp/sim_lab.hpp"

namespace spikecp {
namespace {

TEST(DefaultSpikes, Examples) {
  const auto a = default_spikes(0.5, 0.1);
  EXPECT_NEAR(a[2], 2.0 + std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(a[1], a[2] + 3.0, 1e-14);
  EXPECT_NEAR(a[0], a[1] + 10.0, 1e-14);
  EXPECT_NEAR(default_spikes(0.6, 0.1)[2], 2.0 + std::sqrt(6.0), 1e-14);
  const auto z = default_spikes(0.0, 1.0);
  EXPECT_DOUBLE_EQ(z[0], 15.0);
  EXPECT_DOUBLE_EQ(z[1], 5.0);
  EXPECT_DOUBLE_EQ(z[2], 2.0);
}

TEST(Alternative, NamesRoundTrip) {
  for (auto a : {Alternative::kNull, Alternative::kAlt1, Alternative::kAlt2,
                 Alternative::kAlt3})
    EXPECT_EQ(parse_alternative(to_string(a)), a);
  EXPECT_THROW(parse_alternative("alt4"), SpecError);
}

TEST(Scenario, Presets) {
  const ScenarioSpec d = desk_scenario();
  EXPECT_EQ(d.n, 200u);
  EXPECT_EQ(d.p, 100u);
  EXPECT_EQ(d.replicates, 500u);
  const ScenarioSpec f = full_scenario();
  EXPECT_EQ(f.n, 400u);
  EXPECT_EQ(f.p, 200u);
  EXPECT_EQ(f.replicates, 2000u);
  EXPECT_DOUBLE_EQ(f.y(), 0.5);
}

TEST(Scenario, Validation) {
  ScenarioSpec s = desk_scenario();
  s.t_star = 0.05;  // before t0
  EXPECT_THROW(s.validate(), SpecError);
  s = desk_scenario();
  s.p = 0;
  EXPECT_THROW(s.validate(), SpecError);
  s = desk_scenario();
  s.delta = -1.0;
  EXPECT_THROW(s.validate(), SpecError);
}

TEST(Scenario, DigestTracksInputs) {
  ScenarioSpec a = desk_scenario();
  ScenarioSpec b = a;
  EXPECT_EQ(a.digest(), b.digest());
  b.seed = 2;
  EXPECT_NE(a.digest(), b.digest());
}

TEST(Generate, ShapeAndDeterminism) {
  const ScenarioSpec s = desk_scenario();
  const DataMatrix a = generate(s, 7);
  EXPECT_EQ(a.rows(), 200);
  EXPECT_EQ(a.cols(), 103);
  EXPECT_TRUE(a.isApprox(generate(s, 7), 0.0));
  EXPECT_FALSE(a.isApprox(generate(s, 8)));
  const DataMatrix init = generate_initial(s, 7, 150);
  EXPECT_EQ(init.rows(), 150);
  EXPECT_FALSE(init.isApprox(a.topRows(150)));
}

TEST(Generate, AlternativesShareNormalsBeforeChange) {
  ScenarioSpec s = desk_scenario();
  const DataMatrix null = generate(s, 1);
  s.alternative = Alternative::kAlt1;
  s.delta = 4.0;
  const DataMatrix alt = generate(s, 1);
  const std::size_t change = static_cast<std::size_t>(std::floor(200 * 0.6));
  EXPECT_TRUE(alt.topRows(change).isApprox(null.topRows(change), 0.0));
  EXPECT_FALSE(alt.bottomRows(200 - change).isApprox(null.bottomRows(200 - change)));
}

TEST(Generate, ShiftedVariance) {
  ScenarioSpec s = desk_scenario();
  s.n = 4000;
  s.p = 10;
  s.alternative = Alternative::kAlt1;
  s.delta = 5.0;
  const DataMatrix x = generate(s, 0);
  const auto shifted = s.shifted_alphas();
  const auto base = s.alphas();
  const Eigen::Index change = static_cast<Eigen::Index>(std::floor(4000 * 0.6));
  const double before = x.col(0).head(change).squaredNorm() / static_cast<double>(change);
  const double after =
      x.col(0).tail(4000 - change).squaredNorm() / static_cast<double>(4000 - change);
  EXPECT_NEAR(before / base[0], 1.0, 0.1);
  EXPECT_NEAR(after / shifted[0], 1.0, 0.1);
  EXPECT_GT(shifted[0], base[0]);
}

TEST(Histogram, ConstantSample) {
  const Histogram h = make_histogram({2.0, 2.0, 2.0}, 5);
  EXPECT_EQ(h.edges.size(), 6u);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 3u);
}

TEST(Histogram, CountsEverySample) {
  const Histogram h = make_histogram({0.0, 0.1, 0.5, 0.9, 1.0}, 2);
  ASSERT_EQ(h.counts.size(), 2u);
  EXPECT_DOUBLE_EQ(h.edges.front(), 0.0);
  EXPECT_DOUBLE_EQ(h.edges.back(), 1.0);
  EXPECT_EQ(h.counts[0] + h.counts[1], 5u);
  EXPECT_EQ(h.counts[1], 3u);  // 0.5 falls in the upper bin
  EXPECT_THROW(make_histogram({}, 3), SpecError);
  EXPECT_THROW(make_histogram({1.0}, 0), SpecError);
}

TEST(LevelAndPower, ThreadInvariantAndSane) {
  ScenarioSpec s = desk_scenario();
  s.n = 80;
  s.p = 40;
  s.replicates = 24;
  ExperimentOptions o;
  o.grid_points = 40;
  o.quantile_replicates = 2000;
  o.threads = 1;
  const auto one = level_and_power(s, {Alternative::kAlt1}, {0.0, 40.0}, o);
  o.threads = 3;
  const auto three = level_and_power(s, {Alternative::kAlt1}, {0.0, 40.0}, o);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].rejection_max, three[0].rejection_max);
  EXPECT_EQ(one[0].rejection_sum, three[0].rejection_sum);
  EXPECT_LT(one[0].rejection_max[0], 0.5);
  EXPECT_GT(one[0].rejection_max[1], 0.9);
}

TEST(KernelValidation, ShapeAndAgreement) {
  ScenarioSpec s = desk_scenario();
  s.replicates = 300;
  const auto rows = kernel_validation(s, {0.5, 1.0}, 1);
  // Three spikes, all ordered pairs of two times.
  EXPECT_EQ(rows.size(), 12u);
  for (const auto& r : rows) {
    EXPECT_GT(r.analytic, 0.0);
    EXPECT_LT(r.rel_err, 0.5);
  }
}

}  // namespace
}  // namespace spikecp
