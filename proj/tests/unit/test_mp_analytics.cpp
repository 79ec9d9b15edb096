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

#include "spikecp/errors.hpp"
#include "spikecp/mp_analytics.hpp"

namespace spikecp {
namespace {

TEST(PhaseInterval, Examples) {
  const Interval a = phase_interval(0.5, 0.1);
  EXPECT_NEAR(a.lower, 1.0 - std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(a.upper, 1.0 + std::sqrt(5.0), 1e-15);
  const Interval b = phase_interval(0.25, 1.0);
  EXPECT_DOUBLE_EQ(b.lower, 0.5);
  EXPECT_DOUBLE_EQ(b.upper, 1.5);
  const Interval c = phase_interval(1e-300, 1.0);
  EXPECT_NEAR(c.lower, 1.0, 1e-140);
  EXPECT_NEAR(c.upper, 1.0, 1e-140);
  EXPECT_THROW(phase_interval(-0.1, 0.5), DomainError);
}

TEST(PhaseInterval, SupercriticalMargin) {
  const double edge = 1.0 + std::sqrt(5.0);
  EXPECT_FALSE(is_supercritical(edge, 0.5, 0.1));
  EXPECT_FALSE(is_supercritical(edge + 5e-7, 0.5, 0.1));
  EXPECT_TRUE(is_supercritical(edge + 2e-6, 0.5, 0.1));
  EXPECT_TRUE(is_supercritical(-2.0, 0.5, 0.1));
  EXPECT_THROW(require_supercritical(2.0, 0.5, 0.1), DomainError);
  EXPECT_NO_THROW(require_supercritical(2.0 + std::sqrt(5.0), 0.5, 0.1));
}

TEST(Phi, Examples) {
  EXPECT_DOUBLE_EQ(phi(2.0, 0.25, 1.0), 2.5);
  EXPECT_DOUBLE_EQ(phi(2.0, 0.0, 0.7), 1.4);
  const double a = 2.0 + std::sqrt(5.0);
  EXPECT_NEAR(phi(a, 0.5, 0.1), 1.0784, 1e-3);
  EXPECT_THROW(phi(1.0, 0.5, 1.0), DomainError);
}

TEST(PhiN, Examples) {
  EXPECT_DOUBLE_EQ(phi_n(2.0, 0.5, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(phi_n(3.0, 0.5, 0.5), 2.25);
  EXPECT_NEAR(phi_n(2.0, 200.0 / 400.0, 0.6), 2.2, 1e-15);
}

TEST(InvertPhi, Examples) {
  EXPECT_NEAR(invert_phi(3.0, 0.5), 2.0, 1e-14);
  EXPECT_NEAR(invert_phi(2.5, 0.25), 2.0, 1e-14);
  EXPECT_THROW(invert_phi(1.9, 0.5), DomainError);
}

TEST(InvertPhi, RoundTrip) {
  for (double y : {0.05, 0.3, 0.5, 0.9})
    for (double a : {1.0 + std::sqrt(y) + 1e-3, 3.0, 7.5, 40.0, 1e4}) {
      const double back = invert_phi(phi_n(a, y, 1.0), y);
      EXPECT_NEAR(back, a, 1e-10 * a) << "alpha " << a << " y " << y;
    }
}

TEST(ClosedForms, Examples) {
  EXPECT_DOUBLE_EQ(m1(2.0, 0.25, 1.0), 1.0);
  EXPECT_NEAR(m3(2.0, 0.25, 1.0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(m_stieltjes(2.0, 0.25, 1.0), -0.8, 1e-15);
}

TEST(ClosedForms, RejectSubcritical) {
  EXPECT_THROW(m1(1.2, 0.25, 1.0), DomainError);
  EXPECT_THROW(m3(1.5, 0.25, 1.0), DomainError);
  EXPECT_THROW(m_stieltjes(2.0, 0.25, 0.0), DomainError);
}

TEST(MpIntegral, Examples) {
  EXPECT_NEAR(mp_integral([](double) { return 1.0; }, 0.5, 1.0), 1.0, 1e-9);
  EXPECT_NEAR(mp_integral([](double x) { return x; }, 0.5, 1.0), 1.0, 1e-9);
  const double lambda = 2.5;
  EXPECT_NEAR(mp_integral([&](double x) { return x / ((lambda - x) * (lambda - x)); },
                          0.25, 1.0),
              4.0 / 3.0, 1e-9);
}

TEST(MpIntegral, AtomAboveOne) {
  // y_t = 2: half of the mass sits at zero, the rest has mean 2.
  EXPECT_NEAR(mp_integral([](double) { return 1.0; }, 2.0, 1.0), 1.0, 1e-9);
  EXPECT_NEAR(mp_integral([](double x) { return x == 0.0 ? 1.0 : 0.0; }, 2.0, 1.0), 0.5,
              1e-9);
  // Dilation: the mean of F_{y_t}(x / t) is t.
  EXPECT_NEAR(mp_integral([](double x) { return x; }, 0.5, 0.3), 0.3, 1e-9);
}

}  // namespace
}  // namespace spikecp
