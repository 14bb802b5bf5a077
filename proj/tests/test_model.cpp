// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "sscuc/cases.hpp"
#include "sscuc/model.hpp"

namespace {

using namespace sscuc;

// Direct DC solve oracle: B * theta = injection (slack angle fixed at 0),
// flows from angle differences.
std::vector<double> dc_flows_oracle(const SystemCase& sys,
                                    const std::vector<double>& inj) {
  int nb = sys.num_buses();
  int slack = sys.bus_index(sys.effective_slack());
  std::vector<int> red(nb, -1);
  int nr = 0;
  for (int b = 0; b < nb; ++b)
    if (b != slack) red[b] = nr++;
  std::vector<double> bmat(static_cast<size_t>(nr) * nr, 0.0);
  for (const auto& ln : sys.lines) {
    int i = sys.bus_index(ln.from_bus), j = sys.bus_index(ln.to_bus);
    double y = 1.0 / ln.reactance;
    if (red[i] >= 0) bmat[red[i] * nr + red[i]] += y;
    if (red[j] >= 0) bmat[red[j] * nr + red[j]] += y;
    if (red[i] >= 0 && red[j] >= 0) {
      bmat[red[i] * nr + red[j]] -= y;
      bmat[red[j] * nr + red[i]] -= y;
    }
  }
  std::vector<double> rhs(nr);
  for (int b = 0; b < nb; ++b)
    if (red[b] >= 0) rhs[red[b]] = inj[b];
  EXPECT_TRUE(detail::lu_solve(bmat, rhs, nr, 1));
  std::vector<double> theta(nb, 0.0);
  for (int b = 0; b < nb; ++b)
    if (red[b] >= 0) theta[b] = rhs[red[b]];
  std::vector<double> f;
  for (const auto& ln : sys.lines) {
    int i = sys.bus_index(ln.from_bus), j = sys.bus_index(ln.to_bus);
    f.push_back((theta[i] - theta[j]) / ln.reactance);
  }
  return f;
}

TEST(ShiftFactors, TriangleClosedForm) {
  auto sys = cases::triangle3();
  auto net = compute_shift_factors(sys);
  int b2 = sys.bus_index(2), b3 = sys.bus_index(3);
  // Injection at bus 2 withdrawn at slack bus 1 splits 2/3 direct, 1/3 around.
  EXPECT_NEAR(net.shift(0, b2), -2.0 / 3.0, 1e-12);  // line 1-2
  EXPECT_NEAR(net.shift(1, b2), -1.0 / 3.0, 1e-12);  // line 1-3
  EXPECT_NEAR(net.shift(2, b2), 1.0 / 3.0, 1e-12);   // line 2-3
  EXPECT_NEAR(net.shift(0, b3), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(net.shift(1, b3), -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(net.shift(2, b3), -1.0 / 3.0, 1e-12);
  // Slack column is identically zero.
  for (int l = 0; l < net.n_lines; ++l)
    EXPECT_DOUBLE_EQ(net.shift(l, sys.bus_index(1)), 0.0);
}

TEST(ShiftFactors, MatchesDirectDcSolveOnRandomNetworks) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    SystemCase sys;
    int nb = 3 + static_cast<int>(rng() % 6);
    for (int b = 0; b < nb; ++b) sys.buses.push_back(b + 1);
    sys.horizon = 1;
    std::uniform_real_distribution<double> xdist(0.01, 0.5);
    int id = 1;
    for (int b = 1; b < nb; ++b) {  // random spanning tree
      int parent = static_cast<int>(rng() % b);
      sys.lines.push_back({id++, parent + 1, b + 1, xdist(rng), 1000.0});
    }
    for (int extra = 0; extra < nb / 2; ++extra) {
      int i = static_cast<int>(rng() % nb), j = static_cast<int>(rng() % nb);
      if (i == j) continue;
      sys.lines.push_back({id++, i + 1, j + 1, xdist(rng), 1000.0});
    }
    ThermalUnit u;
    u.id = 1;
    u.bus = 1;
    u.p_min = 0;
    u.p_max = 1000;
    u.ramp_up = u.ramp_down = 1000;
    u.cost_segments = {{1000.0, 10.0}};
    sys.units = {u};
    LoadPoint lp;
    lp.bus = nb;
    lp.hourly_mean = {50.0};
    sys.loads = {lp};
    sys.spinning_reserve_req = {0.0};
    sys.operating_reserve_req = {0.0};
    sys.validate();

    auto net = compute_shift_factors(sys);
    // Random balanced injection.
    std::vector<double> inj(nb);
    double sum = 0.0;
    for (int b = 1; b < nb; ++b) {
      inj[b] = std::uniform_real_distribution<double>(-100, 100)(rng);
      sum += inj[b];
    }
    inj[0] = -sum;  // slack balances
    auto got = net.flows(inj);
    auto want = dc_flows_oracle(sys, inj);
    for (size_t l = 0; l < want.size(); ++l)
      EXPECT_NEAR(got[l], want[l], 1e-9) << "trial " << trial << " line " << l;

    // Kirchhoff: flow balance at every bus.
    for (int b = 0; b < nb; ++b) {
      double net_out = 0.0;
      for (size_t l = 0; l < sys.lines.size(); ++l) {
        if (sys.bus_index(sys.lines[l].from_bus) == b) net_out += got[l];
        if (sys.bus_index(sys.lines[l].to_bus) == b) net_out -= got[l];
      }
      EXPECT_NEAR(net_out, inj[b], 1e-8);
    }
  }
}

TEST(Validation, CollectsFieldDiagnostics) {
  auto sys = cases::tiny2();
  sys.units[0].p_min = 500.0;  // above p_max
  sys.units[0].ramp_up = 0.0;
  sys.lines[0].reactance = -1.0;
  try {
    sys.validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("p_min > p_max"), std::string::npos);
    EXPECT_NE(msg.find("ramp_up"), std::string::npos);
    EXPECT_NE(msg.find("reactance"), std::string::npos);
  }
}

TEST(Validation, DetectsDisconnectedNetwork) {
  auto sys = cases::triangle3();
  sys.buses.push_back(9);  // stranded bus
  EXPECT_THROW(sys.validate(), ValidationError);
}

TEST(Validation, NonConvexCostRejected) {
  auto sys = cases::six_bus();
  sys.units[0].cost_segments = {{120.0, 16.0}, {220.0, 13.0}};  // decreasing mc
  EXPECT_THROW(sys.validate(), ValidationError);
}

TEST(Validation, ProfileLengthMismatch) {
  auto sys = cases::tiny2();
  sys.loads[0].hourly_mean.pop_back();
  try {
    sys.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("hourly_mean"), std::string::npos);
  }
}

TEST(Validation, BundledFixturesAreValid) {
  EXPECT_NO_THROW(cases::six_bus().validate());
  EXPECT_NO_THROW(cases::tiny2().validate());
  EXPECT_NO_THROW(cases::triangle3().validate());
  auto six = cases::six_bus();
  EXPECT_EQ(six.num_units(), 3);
  EXPECT_EQ(six.num_wind(), 1);
  EXPECT_EQ(six.num_loads(), 3);
  EXPECT_EQ(six.horizon, 24);
}

TEST(EnergyCost, PiecewiseLinearByHand) {
  ThermalUnit u;
  u.cost_segments = {{120.0, 13.0}, {220.0, 16.0}};
  EXPECT_DOUBLE_EQ(u.energy_cost(0.0), 0.0);
  EXPECT_DOUBLE_EQ(u.energy_cost(100.0), 1300.0);
  EXPECT_DOUBLE_EQ(u.energy_cost(120.0), 1560.0);
  EXPECT_DOUBLE_EQ(u.energy_cost(200.0), 1560.0 + 80.0 * 16.0);
}

TEST(CaseIo, JsonRoundTripPreservesCase) {
  auto sys = cases::six_bus();
  std::string path = "roundtrip_case.json";
  save_case(sys, path);
  auto back = load_case(path);
  nlohmann::json a = sys, b = back;
  EXPECT_EQ(a, b);
  std::remove(path.c_str());
}

TEST(CaseIo, DistinguishesErrorKinds) {
  EXPECT_THROW(load_case("no_such_file.json"), ValidationError);

  {
    std::ofstream out("bad_json.json");
    out << "{ not json";
  }
  try {
    load_case("bad_json.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("not valid JSON"), std::string::npos);
  }
  std::remove("bad_json.json");

  {
    std::ofstream out("bad_schema.json");
    out << R"({"buses": [1]})";
  }
  try {
    load_case("bad_schema.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("schema violation"), std::string::npos);
  }
  std::remove("bad_schema.json");

  {
    auto sys = cases::tiny2();
    sys.units[0].p_max = -5.0;
    nlohmann::json j = sys;
    std::ofstream out("bad_semantics.json");
    out << j.dump();
  }
  try {
    load_case("bad_semantics.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("validation failed"), std::string::npos);
  }
  std::remove("bad_semantics.json");
}

TEST(CaseIo, UnknownBuiltinNamed) {
  EXPECT_THROW(cases::builtin("nope"), ValidationError);
  EXPECT_NO_THROW(cases::builtin("six_bus"));
}

}  // namespace
