// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: the seven release criteria, each reported as one
// PASS/FAIL line. Tolerances are pinned here and nowhere else.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sscuc/cases.hpp"
#include "sscuc/driver.hpp"
#include "sscuc/eval.hpp"
#include "sscuc/pem.hpp"
#include "test_util.hpp"

#ifndef SSCUC_CLI_PATH
#define SSCUC_CLI_PATH ""
#endif

namespace {

using namespace sscuc;

class Acceptance : public ::testing::Test {
 protected:
  void TearDown() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::printf("[%s] %s\n", HasFailure() ? "FAIL" : "PASS", info->name());
    std::fflush(stdout);
  }
};

// ---------------------------------------------------------------------------
// 1. Two-point-estimate algebra: analytic values to 1e-12 and the total-weight
//    identity over 1000 random (skewness, m) draws.
TEST_F(Acceptance, Criterion1_TpeAlgebraExact) {
  {
    auto [x1, x2] = pem::standard_locations(0.0, 1);
    EXPECT_NEAR(x1, 1.0, 1e-12);
    EXPECT_NEAR(x2, -1.0, 1e-12);
    auto [w1, w2] = pem::weights(x1, x2, 1);
    EXPECT_NEAR(w1, 0.5, 1e-12);
    EXPECT_NEAR(w2, 0.5, 1e-12);
  }
  {
    auto [x1, x2] = pem::standard_locations(1.0, 2);
    EXPECT_NEAR(x1, 2.0, 1e-12);
    EXPECT_NEAR(x2, -1.0, 1e-12);
    auto [w1, w2] = pem::weights(x1, x2, 2);
    EXPECT_NEAR(w1, 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(w2, 1.0 / 3.0, 1e-12);
  }
  std::mt19937_64 rng(20260823);
  std::uniform_real_distribution<double> lam(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int m = 1 + static_cast<int>(rng() % 10);
    std::vector<pem::RandomInput> inputs;
    for (int v = 0; v < m; ++v) inputs.push_back({v, 0.0, 1.0, lam(rng)});
    auto conc = pem::build_concentrations(inputs);
    ASSERT_EQ(conc.size(), static_cast<size_t>(2 * m)) << "trial " << trial;
    double wsum = 0.0;
    for (const auto& c : conc) wsum += c.weight;
    EXPECT_NEAR(wsum, 1.0, 1e-12) << "trial " << trial;
  }
}

// ---------------------------------------------------------------------------
// 2. Moment exactness: P^j exact to 1e-9 relative for j <= 3 on a single
//    (possibly skewed) input; exact means for random multivariate linear maps.
TEST_F(Acceptance, Criterion2_MomentExactness) {
  const double mu = 10.0, sigma = 2.0;
  for (double lam3 : {0.0, 0.8, -1.2}) {
    auto conc = pem::build_concentrations({{0, mu, sigma, lam3}});
    // Raw moments from (mu, sigma, lambda3): E P = mu, E P^2 = mu^2+sigma^2,
    // E P^3 = mu^3 + 3 mu sigma^2 + lambda3 sigma^3.
    double want[3] = {mu, mu * mu + sigma * sigma,
                      mu * mu * mu + 3.0 * mu * sigma * sigma +
                          lam3 * sigma * sigma * sigma};
    for (int j = 1; j <= 3; ++j) {
      std::vector<std::pair<double, double>> evals;
      for (const auto& c : conc)
        evals.push_back({c.weight, std::pow(c.location, j)});
      double got = pem::estimate_moments(evals, 1).mean();
      EXPECT_NEAR(got / want[j - 1], 1.0, 1e-9) << "lam3=" << lam3 << " j=" << j;
    }
  }

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    int m = 1 + static_cast<int>(rng() % 10);
    std::vector<pem::RandomInput> inputs;
    std::vector<double> a(m);
    double b = coef(rng), want = b;
    for (int v = 0; v < m; ++v) {
      inputs.push_back({v, coef(rng), std::fabs(coef(rng)) + 0.1, coef(rng) / 3.0});
      a[v] = coef(rng);
      want += a[v] * inputs[v].mean;
    }
    auto conc = pem::build_concentrations(inputs);
    std::vector<std::pair<double, double>> evals;
    for (const auto& c : conc) {
      double z = b;
      for (int v = 0; v < m; ++v)
        z += a[v] * (v == c.variable ? c.location : inputs[v].mean);
      evals.push_back({c.weight, z});
    }
    double got = pem::estimate_moments(evals, 1).mean();
    EXPECT_NEAR(got, want, 1e-9 * (1.0 + std::fabs(want))) << "trial " << trial;
  }
}

// ---------------------------------------------------------------------------
// 3. Oracle equivalence: decomposed scenario solve equals the extensive-form
//    MILP within 1e-4 relative on 100 random tiny instances, <= 1 s each.
TEST_F(Acceptance, Criterion3_BendersMatchesExtensiveForm) {
  std::mt19937_64 rng(3003);
  SolveOptions opt;
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto t0 = std::chrono::steady_clock::now();
    auto inst = testutil::random_tiny_instance(rng, /*max_scenarios=*/2);
    auto ext = testutil::extensive_form(inst.sys, inst.points);
    if (ext.status != opt::Status::Optimal) {
      EXPECT_THROW(solve_with_scenarios(inst.sys, inst.set, opt), SolveError)
          << "trial " << trial;
    } else {
      auto rep = solve_with_scenarios(inst.sys, inst.set, opt);
      EXPECT_TRUE(rep.converged) << "trial " << trial;
      EXPECT_NEAR(rep.master_cost, ext.objective,
                  1e-4 * (1.0 + std::fabs(ext.objective)))
          << "trial " << trial;
      ++compared;
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    EXPECT_LE(secs, 1.0) << "trial " << trial;
  }
  EXPECT_GE(compared, 30);
}

// ---------------------------------------------------------------------------
// 4. MILP kernel: equals brute-force enumeration on 500 random instances with
//    <= 12 binaries; every optimal solve carries duality residuals <= 1e-6.
TEST_F(Acceptance, Criterion4_MilpKernelAgainstBruteForce) {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), rhs(-2.0, 8.0);
  auto certify = [](const opt::Solution& s) {
    EXPECT_LE(s.primal_residual, 1e-6 * 10.0);
    EXPECT_LE(s.complementarity, 1e-6 * 10.0);
    EXPECT_LE(s.duality_gap, 1e-6 * (1.0 + std::fabs(s.objective)));
  };
  for (int trial = 0; trial < 500; ++trial) {
    int nb = 1 + static_cast<int>(rng() % 12);
    int nc = static_cast<int>(rng() % 5);
    int nr = 1 + static_cast<int>(rng() % 7);
    opt::LinearProgram lp;
    for (int j = 0; j < nb; ++j) lp.add_var(0, 1, coef(rng), true);
    for (int j = 0; j < nc; ++j) lp.add_var(0, 4.0, coef(rng));
    for (int i = 0; i < nr; ++i) {
      std::vector<std::pair<int, double>> terms;
      for (int j = 0; j < lp.num_vars(); ++j) {
        double a = coef(rng);
        if (std::fabs(a) > 2.0) terms.push_back({j, a});
      }
      if (terms.empty()) terms.push_back({0, 1.0});
      lp.add_row(std::move(terms),
                 trial % 3 == 0 ? opt::Sense::GE : opt::Sense::LE, rhs(rng));
    }

    // Independent oracle: enumerate every binary pattern.
    std::vector<int> bins;
    for (int j = 0; j < lp.num_vars(); ++j)
      if (lp.binary[j]) bins.push_back(j);
    opt::LinearProgram work = lp;
    bool any = false;
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << bins.size()); ++mask) {
      for (size_t k = 0; k < bins.size(); ++k) {
        double v = (mask >> k) & 1 ? 1.0 : 0.0;
        work.lb[bins[k]] = v;
        work.ub[bins[k]] = v;
      }
      opt::Solution s = opt::solve_lp(work);
      if (s.status == opt::Status::Optimal) {
        certify(s);
        if (!any || s.objective < best) best = s.objective;
        any = true;
      }
    }

    opt::Solution bb = opt::solve_milp(lp);
    ASSERT_EQ(bb.status == opt::Status::Optimal, any) << "trial " << trial;
    if (any)
      EXPECT_NEAR(bb.objective, best, 1e-6 * (1.0 + std::fabs(best)))
          << "trial " << trial;
  }
}

// ---------------------------------------------------------------------------
// 5. Fixture-shape properties on the bundled six-bus case (4 random inputs):
//    8 scenario LPs per hour per iteration; base <= TPE cost; TPE within 2%
//    of the 200-scenario Monte-Carlo benchmark; TPE faster than the
//    100-scenario run; convergence in <= 10 iterations.
TEST_F(Acceptance, Criterion5_SixBusShapeAndCosts) {
  auto sys = cases::six_bus();
  auto det = solve_deterministic(sys);
  auto tpe = solve_stochastic_tpe(sys);

  EXPECT_EQ(tpe.n_points, 8);  // 2m concentrations, m = 4
  for (const auto& it : tpe.history)
    EXPECT_EQ(it.subproblems, sys.horizon * (1 + 8));
  EXPECT_LE(tpe.iterations, 10);
  EXPECT_LE(det.iterations, 10);
  EXPECT_LE(det.master_cost, tpe.master_cost + 1e-6);

  SolveOptions o100;
  o100.mcs_samples = 10000;
  o100.mcs_reduced = 100;
  auto mcs100 = solve_stochastic_mcs(sys, o100);
  SolveOptions o200 = o100;
  o200.mcs_reduced = 200;
  auto mcs200 = solve_stochastic_mcs(sys, o200);
  EXPECT_LE(mcs100.iterations, 10);
  EXPECT_LE(mcs200.iterations, 10);

  double rel = std::fabs(tpe.expected_cost - mcs200.expected_cost) /
               std::fabs(mcs200.expected_cost);
  EXPECT_LE(rel, 0.02);
  EXPECT_LT(tpe.wall_seconds, mcs100.wall_seconds);
}

// ---------------------------------------------------------------------------
// 6. Evaluation direction: on fresh 10000 samples, CAI(TPE) <= CAI(base),
//    ESC(TPE vs base) >= 0, and the base CAI is half-sample stable within
//    3 binomial standard errors.
TEST_F(Acceptance, Criterion6_EvaluationDirection) {
  auto sys = cases::six_bus();
  auto net = compute_shift_factors(sys);
  auto det = solve_deterministic(sys);
  auto tpe = solve_stochastic_tpe(sys);

  auto set = stochastic::sample(sys, 10000, /*seed=*/777);
  auto cai_base = eval::cai(sys, net, det.schedule, set);
  auto cai_tpe = eval::cai(sys, net, tpe.schedule, set);
  EXPECT_LE(cai_tpe.cai, cai_base.cai + 1e-12);
  EXPECT_GE(eval::esc(sys, tpe.schedule, det.schedule), 0.0);

  // Half-sample stability of the (nondegenerate) base CAI.
  auto half = [&](int lo, int n) {
    stochastic::ScenarioSet h;
    h.n_vars = set.n_vars;
    h.prob.assign(n, 1.0 / n);
    h.deviates.assign(set.deviates.begin() + static_cast<size_t>(lo) * set.n_vars,
                      set.deviates.begin() +
                          static_cast<size_t>(lo + n) * set.n_vars);
    return eval::cai(sys, net, det.schedule, h).cai;
  };
  double p = cai_base.cai;
  ASSERT_GT(p, 0.0);  // fixture keeps the base schedule imperfect
  double se = std::sqrt(p * (1.0 - p) / 5000.0);
  EXPECT_NEAR(half(0, 5000), p, 3.0 * se);
  EXPECT_NEAR(half(5000, 5000), p, 3.0 * se);
}

// ---------------------------------------------------------------------------
// 7. Determinism: every CLI subcommand, at fixed seed and config, writes
//    byte-identical files across two consecutive runs.
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  EXPECT_TRUE(in.good()) << p;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_F(Acceptance, Criterion7_CliOutputsAreByteIdentical) {
  std::string cli = SSCUC_CLI_PATH;
  ASSERT_FALSE(cli.empty());
  auto root = std::filesystem::temp_directory_path() / "sscuc_acceptance";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  auto run = [&](const std::string& args) {
    std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0) << cmd;
  };
  auto same = [&](const std::string& a, const std::string& b,
                  const std::string& file) {
    EXPECT_EQ(slurp(root / a / file), slurp(root / b / file))
        << file << " differs between runs";
  };
  std::string R = root.string();

  for (const char* tag : {"a", "b"}) {
    std::string d = R + "/" + tag;
    run("gen-case --out " + d + "/gen");
    run("solve --case six_bus --mode mcs --samples 2000 --reduced 20 --seed 5"
        " --out " + d + "/solve");
    run("evaluate --case six_bus --schedule " + d +
        "/solve/report.json --samples 2000 --seed 5 --out " + d + "/eval");
    run("benchmark --case six_bus --samples 2000 --reduced 20 30 --seed 5"
        " --out " + d + "/bench");
  }
  for (const char* f : {"gen/six_bus.case.json", "gen/tiny2.case.json",
                        "gen/triangle3.case.json", "solve/report.json",
                        "solve/schedule.csv", "eval/evaluation.json",
                        "eval/violations.csv", "bench/benchmark.json",
                        "bench/benchmark.csv"})
    same("a", "b", f);
}

}  // namespace
