// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sscuc/cases.hpp"
#include "sscuc/stochastic.hpp"

namespace {

using namespace sscuc;
using namespace sscuc::stochastic;

// Numeric-integration oracle for truncated-normal moments (Simpson rule).
double tn_moment_oracle(const TruncatedNormal& tn, int k) {
  const int n = 20000;
  double lo = std::max(tn.a, tn.mu0 - 10 * tn.sigma0);
  double hi = std::min(tn.b, tn.mu0 + 10 * tn.sigma0);
  double h = (hi - lo) / n, num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = lo + i * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double p = normal_pdf((x - tn.mu0) / tn.sigma0);
    double zk = std::pow((x - tn.mu0) / tn.sigma0, k);
    num += w * zk * p;
    den += w * p;
  }
  return num / den;
}

TEST(TruncatedNormal, MomentRecursionMatchesQuadrature) {
  TruncatedNormal tn{1.0, 0.1, 0.7, 1.3};
  for (int k = 1; k <= 4; ++k)
    EXPECT_NEAR(tn.std_moment(k), tn_moment_oracle(tn, k), 1e-8) << "k=" << k;

  TruncatedNormal skewed{0.0, 1.0, -0.5, 3.0};
  for (int k = 1; k <= 4; ++k)
    EXPECT_NEAR(skewed.std_moment(k), tn_moment_oracle(skewed, k), 1e-7) << "k=" << k;
  EXPECT_GT(skewed.skewness(), 0.0);  // left-truncated -> right skew
}

TEST(TruncatedNormal, WideBoundsReduceToNormal) {
  TruncatedNormal tn{5.0, 2.0, 5.0 - 16.0, 5.0 + 16.0};
  EXPECT_NEAR(tn.mean(), 5.0, 1e-9);
  EXPECT_NEAR(tn.std_dev(), 2.0, 1e-9);
  EXPECT_NEAR(tn.skewness(), 0.0, 1e-9);
}

TEST(TruncatedNormal, CalibrationHitsPostTruncationTargets) {
  auto tn = TruncatedNormal::calibrate(1.0, 0.10, 0.7, 1.3);
  EXPECT_NEAR(tn.mean(), 1.0, 1e-9);
  EXPECT_NEAR(tn.std_dev(), 0.10, 1e-9);
  // Symmetric bounds with symmetric targets keep the parameters centered,
  // but the pre-truncation sigma must exceed the post-truncation target.
  EXPECT_GT(tn.sigma0, 0.10);
}

TEST(RandomVariables, OrderingAndCalibration) {
  auto sys = cases::six_bus();
  auto vars = random_variables(sys);
  ASSERT_EQ(vars.size(), 4u);  // 1 wind + 3 loads
  EXPECT_EQ(vars[0].kind, RandomVariable::Kind::Wind);
  EXPECT_FALSE(vars[0].truncated);
  EXPECT_DOUBLE_EQ(vars[0].sigma, sys.wind[0].sigma_fraction);
  for (int v = 1; v < 4; ++v) {
    EXPECT_EQ(vars[v].kind, RandomVariable::Kind::Load);
    EXPECT_TRUE(vars[v].truncated);
    EXPECT_DOUBLE_EQ(vars[v].sigma, sys.loads[v - 1].sigma_fraction);
    EXPECT_NEAR(vars[v].tn.mean(), 1.0, 1e-9);
    EXPECT_NEAR(vars[v].tn.std_dev(), vars[v].sigma, 1e-9);
  }
  auto inputs = pem_inputs(sys);
  ASSERT_EQ(inputs.size(), 4u);
  EXPECT_DOUBLE_EQ(inputs[0].skewness, 0.0);
  EXPECT_NEAR(inputs[1].skewness, vars[1].tn.skewness(), 1e-12);
}

TEST(Sampling, DeterministicForFixedSeed) {
  auto sys = cases::six_bus();
  auto a = sample(sys, 500, 123);
  auto b = sample(sys, 500, 123);
  EXPECT_EQ(a.deviates, b.deviates);
  EXPECT_EQ(a.prob, b.prob);
  auto c = sample(sys, 500, 124);
  EXPECT_NE(a.deviates, c.deviates);
}

TEST(Sampling, StatisticsMatchTargets) {
  auto sys = cases::six_bus();
  const int n = 100000;
  auto set = sample(sys, n, 2024);
  auto vars = random_variables(sys);
  for (int v = 0; v < set.n_vars; ++v) {
    double s1 = 0.0, s2 = 0.0;
    for (int s = 0; s < n; ++s) {
      double x = set.deviate(s, v);
      s1 += x;
      s2 += x * x;
      if (vars[v].truncated) {
        EXPECT_GE(x, vars[v].tn.a);
        EXPECT_LE(x, vars[v].tn.b);
      } else {
        EXPECT_GE(x, 0.0);
      }
    }
    double mean = s1 / n;
    double sd = std::sqrt(s2 / n - mean * mean);
    EXPECT_NEAR(mean, 1.0, 0.01) << "var " << v;
    EXPECT_NEAR(sd, vars[v].sigma, 0.03 * vars[v].sigma) << "var " << v;
  }
  double psum = 0.0;
  for (double p : set.prob) psum += p;
  EXPECT_NEAR(psum, 1.0, 1e-9);
}

TEST(Reduction, IdentityAtFullTarget) {
  auto sys = cases::six_bus();
  auto set = sample(sys, 50, 5);
  auto red = reduce(set, 50);
  EXPECT_EQ(red.deviates, set.deviates);
  EXPECT_EQ(red.prob, set.prob);
}

TEST(Reduction, ZeroDistanceMerge) {
  ScenarioSet set;
  set.n_vars = 2;
  set.deviates = {1.0, 2.0, 1.0, 2.0};  // two identical scenarios
  set.prob = {0.5, 0.5};
  auto red = reduce(set, 1);
  ASSERT_EQ(red.size(), 1);
  EXPECT_NEAR(red.prob[0], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(red.deviate(0, 0), 1.0);
}

TEST(Reduction, NearestKeptAbsorbsProbability) {
  ScenarioSet set;
  set.n_vars = 1;
  set.deviates = {0.0, 0.1, 10.0, 10.2};
  set.prob = {0.4, 0.1, 0.3, 0.2};
  auto red = reduce(set, 2);
  ASSERT_EQ(red.size(), 2);
  // Two clusters; each kept scenario absorbs its neighbor's probability.
  double lo_prob = 0.0, hi_prob = 0.0;
  for (int s = 0; s < 2; ++s)
    (red.deviate(s, 0) < 5.0 ? lo_prob : hi_prob) += red.prob[s];
  EXPECT_NEAR(lo_prob, 0.5, 1e-12);
  EXPECT_NEAR(hi_prob, 0.5, 1e-12);
}

TEST(Reduction, ObjectiveMonotoneInTargetCount) {
  auto sys = cases::six_bus();
  auto set = sample(sys, 200, 11);
  auto order = fast_forward_order(set, 200);
  double prev = std::numeric_limits<double>::infinity();
  for (int target = 1; target <= 200; target += 7) {
    std::vector<int> kept(order.begin(), order.begin() + target);
    double obj = reduction_objective(set, kept);
    EXPECT_LE(obj, prev + 1e-12);
    prev = obj;
  }
}

TEST(Reduction, GreedyFirstPickIsExact) {
  // The first fast-forward pick must minimize the transport objective over
  // all single-scenario selections.
  auto sys = cases::tiny2();
  auto set = sample(sys, 120, 3);
  auto order = fast_forward_order(set, 1);
  double best = std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int c = 0; c < set.size(); ++c) {
    double obj = reduction_objective(set, {c});
    if (obj < best - 1e-15) {
      best = obj;
      arg = c;
    }
  }
  EXPECT_EQ(order[0], arg);
}

TEST(Reduction, ProbabilityConservedExactly) {
  auto sys = cases::six_bus();
  auto set = sample(sys, 5000, 17);
  for (int target : {1, 10, 100}) {
    auto red = reduce(set, target);
    ASSERT_EQ(red.size(), target);
    double psum = 0.0;
    for (double p : red.prob) {
      EXPECT_GT(p, 0.0);
      psum += p;
    }
    EXPECT_NEAR(psum, 1.0, 1e-12);
    EXPECT_EQ(red.provenance, Provenance::Reduced);
  }
}

TEST(Reduction, DomainErrors) {
  auto sys = cases::tiny2();
  auto set = sample(sys, 10, 1);
  EXPECT_THROW(reduce(set, 0), std::invalid_argument);
  EXPECT_THROW(reduce(set, 11), std::invalid_argument);
}

TEST(Csv, RoundTripPreservesSet) {
  auto sys = cases::six_bus();
  auto set = reduce(sample(sys, 300, 9), 40);
  std::stringstream ss;
  write_csv(set, ss);
  auto back = read_csv(ss);
  ASSERT_EQ(back.size(), set.size());
  ASSERT_EQ(back.n_vars, set.n_vars);
  for (int s = 0; s < set.size(); ++s) {
    EXPECT_DOUBLE_EQ(back.prob[s], set.prob[s]);
    for (int v = 0; v < set.n_vars; ++v)
      EXPECT_DOUBLE_EQ(back.deviate(s, v), set.deviate(s, v));
  }
}

}  // namespace
