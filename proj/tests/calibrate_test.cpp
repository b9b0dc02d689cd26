//
// Copyright 2026 The puffercal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "puffercal/calibrate.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support/random_scenarios.hpp"

namespace puffercal {
namespace {

const DiscreteDistribution kZero = DiscreteDistribution::point_mass(0.0);
const DiscreteDistribution kOne = DiscreteDistribution::point_mass(1.0);
const DiscreteDistribution kTwo = DiscreteDistribution::point_mass(2.0);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(CalibrateLaplaceTest, PointMassAnalytic) {
  const auto r = calibrate_laplace(kZero, kOne, PrivacySpec::create(2.0, 1.0));
  EXPECT_LT(rel(r.parameter, 2.0), 1e-9);
  EXPECT_TRUE(r.guarantee_side);
  EXPECT_LE(r.log_functional, r.log_target);
  for (const double alpha : {1.1, 1.5, 3.0, 7.0, 40.0}) {
    for (const double eps : {0.05, 0.3, 1.0, 2.0, 6.0}) {
      const double delta = 1.7;
      const auto s = calibrate_laplace(kZero, DiscreteDistribution::point_mass(delta),
                                       PrivacySpec::create(alpha, eps));
      EXPECT_LT(rel(s.parameter, alpha * delta / ((alpha - 1) * eps)), 1e-8);
    }
  }
}

TEST(CalibrateLaplaceTest, IdenticalPriorsNeedNoNoise) {
  const auto d = DiscreteDistribution::create({0, 1, 4}, {0.1, 0.6, 0.3});
  const auto r = calibrate_laplace(d, d, PrivacySpec::create(2.0, 1.0));
  EXPECT_EQ(r.parameter, 0.0);
  EXPECT_TRUE(r.no_noise_needed);
  const auto g = calibrate_gaussian(d, d, PrivacySpec::create(2.0, 1.0));
  EXPECT_EQ(g.parameter, 0.0);
  EXPECT_TRUE(g.no_noise_needed);
}

TEST(CalibrateLaplaceTest, InfiniteOrderUsesWInfinity) {
  const auto r = calibrate_laplace(kZero, kTwo, PrivacySpec::create(kInf, 0.5));
  EXPECT_EQ(r.parameter, 4.0);
}

TEST(CalibrateGaussianTest, PointMassClosedForm) {
  const auto r = calibrate_gaussian(kZero, kOne, PrivacySpec::create(2.0, 1.0));
  EXPECT_LT(rel(r.parameter * r.parameter, 1.0), 1e-9);
  for (const double alpha : {1.2, 2.0, 3.0, 5.0, 11.0}) {
    for (const double eps : {0.1, 0.5, 1.0, 3.0}) {
      const PrivacySpec spec = PrivacySpec::create(alpha, eps);
      const auto s = calibrate_gaussian(kZero, kTwo, spec);
      EXPECT_LT(rel(s.parameter, rdp_gaussian_closed_form(2.0, spec)), 1e-9);
    }
  }
}

TEST(CalibrateGaussianTest, RejectsInfiniteAndSubUnitOrders) {
  EXPECT_THROW(calibrate_gaussian(kZero, kOne, PrivacySpec::create(kInf, 1.0)), Error);
  EXPECT_THROW(calibrate_gaussian(kZero, kOne, PrivacySpec::create(0.5, 1.0)), Error);
}

TEST(CalibrateExponentialTest, AbsoluteCostMatchesLaplace) {
  const auto r = calibrate_exponential(kZero, kOne, Cost::abs(), Rate::reciprocal(),
                                       PrivacySpec::create(2.0, 1.0));
  EXPECT_LT(rel(r.parameter, 2.0), 1e-9);
}

TEST(CalibrateExponentialTest, SquaredCostPointMass) {
  const auto r = calibrate_exponential(kZero, kOne, Cost::squared(), Rate::reciprocal(),
                                       PrivacySpec::create(2.0, 1.0));
  EXPECT_LT(rel(r.parameter, 2.0), 1e-9);
}

TEST(CalibrateExponentialTest, InfiniteOrderClosedForm) {
  const auto p = DiscreteDistribution::create({0, 1}, {0.5, 0.5});
  const auto q = DiscreteDistribution::create({0, 3}, {0.25, 0.75});
  // The monotone plan sends 0 -> {0, 3} and 1 -> 3, so sup c = sqrt(3).
  const double sup_cost = std::sqrt(3.0);
  const Rate rate = Rate::parse("reciprocal-power:2");
  const auto r = calibrate_exponential(p, q, Cost::parse("sqrt"), rate,
                                       PrivacySpec::create(kInf, 0.7));
  EXPECT_LT(rel(r.parameter, rate.inverse(0.7 / sup_cost)), 1e-12);
}

TEST(WInfLaplaceTest, Values) {
  EXPECT_EQ(calibrate_winf_laplace(kZero, kTwo, 0.5).parameter, 4.0);
  const auto r = calibrate_winf_laplace(kOne, kOne, 0.5);
  EXPECT_EQ(r.parameter, 0.0);
  EXPECT_TRUE(r.no_noise_needed);
}

TEST(BaselineTest, LaplaceDivergenceForm) {
  EXPECT_NEAR(baseline_laplace_rpp(kZero, kTwo, PrivacySpec::create(2.0, 0.5)).parameter, 2.30075,
              1e-3);
  EXPECT_NEAR(baseline_laplace_rpp(kZero, kTwo, PrivacySpec::create(5.0, 0.5)).parameter, 3.09429,
              1e-3);
  EXPECT_EQ(baseline_laplace_rpp(kTwo, kTwo, PrivacySpec::create(5.0, 0.5)).parameter, 0.0);
  // At the returned b the Laplace-vs-Laplace divergence is at most epsilon.
  const double alpha = 3.0;
  const double b = baseline_laplace_rpp(kZero, kTwo, PrivacySpec::create(alpha, 0.8)).parameter;
  const double t = 2.0 / b;
  const double d = std::log(alpha / (2 * alpha - 1) * std::exp((alpha - 1) * t) +
                            (alpha - 1) / (2 * alpha - 1) * std::exp(-alpha * t)) /
                   (alpha - 1);
  EXPECT_LE(d, 0.8);
  EXPECT_NEAR(d, 0.8, 1e-8);
}

TEST(BaselineTest, GaussianClosedForm) {
  EXPECT_NEAR(baseline_gaussian_rpp(kZero, kTwo, PrivacySpec::create(2.0, 0.5)).parameter, 2.82843,
              1e-4);
  EXPECT_NEAR(baseline_gaussian_rpp(kZero, kTwo, PrivacySpec::create(1.2, 0.5)).parameter, 2.19089,
              1e-4);
  EXPECT_EQ(baseline_gaussian_rpp(kTwo, kTwo, PrivacySpec::create(2.0, 0.5)).parameter, 0.0);
}

TEST(RdpClosedFormTest, Values) {
  EXPECT_DOUBLE_EQ(rdp_gaussian_closed_form(1.0, PrivacySpec::create(2.0, 1.0)), 1.0);
  EXPECT_EQ(rdp_gaussian_closed_form(0.0, PrivacySpec::create(2.0, 1.0)), 0.0);
  EXPECT_DOUBLE_EQ(rdp_gaussian_closed_form(1.0, PrivacySpec::create(3.0, 0.5)), std::sqrt(3.0));
  const auto g = calibrate_gaussian(kZero, kOne, PrivacySpec::create(3.0, 0.5));
  EXPECT_LT(rel(g.parameter, std::sqrt(3.0)), 1e-9);
}

TEST(SubUnitAlphaTest, PointMassAnalytic) {
  const auto a = feasible_b_sub_unit_alpha(kZero, kOne, PrivacySpec::create(0.5, 1.0));
  EXPECT_LT(rel(a.parameter, 1.0), 1e-9);
  EXPECT_TRUE(a.experimental);
  EXPECT_GE(a.log_functional, a.log_target);
  // b = alpha D / ((1 - alpha) eps) = 0.5 * 2 / 0.25.
  const auto b = feasible_b_sub_unit_alpha(kZero, kTwo, PrivacySpec::create(0.5, 0.5));
  EXPECT_LT(rel(b.parameter, 4.0), 1e-9);
  const auto c = feasible_b_sub_unit_alpha(kOne, kOne, PrivacySpec::create(0.5, 0.5));
  EXPECT_EQ(c.parameter, 0.0);
  EXPECT_TRUE(c.no_noise_needed);
}

TEST(SubUnitAlphaTest, LargeStayingMassNeedsNoNoise) {
  // 95% of the mass stays put: -log 0.95 < (1 - 0.5) * 1.
  const auto p = DiscreteDistribution::create({0, 1}, {0.95, 0.05});
  const auto q = DiscreteDistribution::create({0, 1, 9}, {0.95, 0.025, 0.025});
  const auto r = feasible_b_sub_unit_alpha(p, q, PrivacySpec::create(0.5, 1.0));
  EXPECT_TRUE(r.no_noise_needed);
  EXPECT_EQ(r.parameter, 0.0);
}

TEST(OverScenariosTest, MaximumAndBindingPair) {
  const MechanismChoice laplace = MechanismChoice::parse("laplace");
  const PrivacySpec spec = PrivacySpec::create(2.0, 1.0);
  const auto single = ScenarioSet::create({{kZero, kOne, "one"}});
  EXPECT_EQ(calibrate_over_scenarios(single, laplace, spec).parameter,
            calibrate_laplace(kZero, kOne, spec).parameter);

  const auto with_identical = ScenarioSet::create({{kOne, kOne, "same"}, {kZero, kOne, "one"}});
  const auto r1 = calibrate_over_scenarios(with_identical, laplace, spec);
  EXPECT_EQ(r1.binding_pair_index, 1u);
  EXPECT_LT(rel(r1.parameter, 2.0), 1e-9);

  const auto two = ScenarioSet::create({{kZero, kOne, "d1"}, {kZero, kTwo, "d2"}});
  CalibrateOptions options;
  options.jobs = 2;
  const auto r2 = calibrate_over_scenarios(two, laplace, spec, options);
  EXPECT_LT(rel(r2.parameter, 4.0), 1e-9);
  EXPECT_EQ(r2.binding_pair_index, 1u);
  EXPECT_EQ(r2.binding_label, "d2");

  const auto tie = ScenarioSet::create({{kZero, kOne, "a"}, {kOne, kZero, "b"}});
  EXPECT_EQ(calibrate_over_scenarios(tie, laplace, spec).binding_pair_index, 0u);
}

TEST(OverScenariosTest, ErrorsNameThePair) {
  const auto set = ScenarioSet::create({{kZero, kOne, "fine"}, {kZero, kTwo, "broken"}});
  try {
    calibrate_over_scenarios(set, MechanismChoice::parse("gaussian"), PrivacySpec::create(kInf, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.detail().find("pair 'fine'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ScenarioSet::create({}), Error);
}

class RandomCalibrationTest : public ::testing::Test {
 protected:
  std::mt19937_64 rng_{20260315};
};

TEST_F(RandomCalibrationTest, FunctionalNeverExceedsTarget) {
  const std::vector<double> alphas = {1.3, 2.0, 4.0, 9.0};
  const std::vector<double> epsilons = {0.2, 0.7, 2.0};
  for (int trial = 0; trial < 200; ++trial) {
    const auto pair = testing::random_pair(rng_);
    const Coupling plan = monotone_coupling(pair.p_i, pair.p_j);
    const PrivacySpec spec = PrivacySpec::create(alphas[trial % 4], epsilons[trial % 3]);
    const double a = spec.alpha();
    const auto lap = calibrate_laplace(plan, spec);
    EXPECT_LE(log_exp_moment(plan, [&](double d) { return a * d / lap.parameter; }),
              spec.log_target());
    const auto gau = calibrate_gaussian(plan, spec);
    EXPECT_LE(log_exp_moment(plan, [&](double d) {
                return a * (a - 1) * d * d / (2 * gau.parameter * gau.parameter);
              }),
              spec.log_target());
    const auto ex = calibrate_exponential(plan, Cost::parse("sqrt"), Rate::reciprocal(), spec);
    EXPECT_LE(log_exp_moment(plan, [&](double d) { return a / ex.parameter * std::sqrt(d); }),
              spec.log_target());
    EXPECT_TRUE(lap.guarantee_side && gau.guarantee_side && ex.guarantee_side);
    // Tight up to the solver tolerance.
    const double b_up = lap.parameter * (1 - 1e-8);
    EXPECT_GT(log_exp_moment(plan, [&](double d) { return a * d / b_up; }), spec.log_target());
  }
}

TEST_F(RandomCalibrationTest, NonIncreasingInEpsilon) {
  for (int trial = 0; trial < 30; ++trial) {
    const auto pair = testing::random_pair(rng_);
    for (const double alpha : {1.5, 3.0}) {
      double prev_b = kInf;
      double prev_s = kInf;
      for (const double eps : {0.1, 0.25, 0.5, 1.0, 2.0, 5.0}) {
        const PrivacySpec spec = PrivacySpec::create(alpha, eps);
        const double b = calibrate_laplace(pair.p_i, pair.p_j, spec).parameter;
        const double s = calibrate_gaussian(pair.p_i, pair.p_j, spec).parameter;
        EXPECT_LE(b, prev_b * (1 + 1e-9));
        EXPECT_LE(s, prev_s * (1 + 1e-9));
        prev_b = b;
        prev_s = s;
      }
    }
  }
}

TEST_F(RandomCalibrationTest, LargeOrderApproachesWInfinity) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto pair = testing::random_pair(rng_);
    const double w = w_infinity(pair.p_i, pair.p_j);
    const double b = calibrate_laplace(pair.p_i, pair.p_j, PrivacySpec::create(1e4, 0.5)).parameter;
    EXPECT_LT(std::abs(b * 0.5 - w) / w, 0.01);
  }
}

TEST_F(RandomCalibrationTest, GaussianNeverAboveBaseline) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto pair = testing::random_pair(rng_);
    for (const double alpha : {1.2, 2.0, 5.0}) {
      for (const double eps : {0.5, 1.0}) {
        const PrivacySpec spec = PrivacySpec::create(alpha, eps);
        EXPECT_LE(calibrate_gaussian(pair.p_i, pair.p_j, spec).parameter,
                  baseline_gaussian_rpp(pair.p_i, pair.p_j, spec).parameter * (1 + 1e-9));
      }
    }
  }
}

TEST_F(RandomCalibrationTest, ExponentialWithAbsoluteCostEqualsLaplace) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto pair = testing::random_pair(rng_);
    const PrivacySpec spec = PrivacySpec::create(1.5 + trial % 4, 0.3 + 0.1 * (trial % 7));
    const double b = calibrate_laplace(pair.p_i, pair.p_j, spec).parameter;
    const double theta =
        calibrate_exponential(pair.p_i, pair.p_j, Cost::abs(), Rate::reciprocal(), spec).parameter;
    EXPECT_LT(rel(theta, b), 1e-6);
  }
}

TEST(MechanismChoiceTest, ParseAndVariance) {
  EXPECT_EQ(MechanismChoice::parse("baseline-gaussian").name(), "baseline-gaussian");
  EXPECT_THROW(MechanismChoice::parse("uniform"), Error);
  EXPECT_EQ(variance_for(MechanismChoice::parse("laplace"), 2.0), 8.0);
  EXPECT_EQ(variance_for(MechanismChoice::parse("gaussian"), 2.0), 4.0);
  EXPECT_FALSE(mechanism_for(MechanismChoice::parse("laplace"), 0.0).has_value());
}

}  // namespace
}  // namespace puffercal
