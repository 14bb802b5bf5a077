// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Built-in study systems: a 6-bus day-ahead case with one wind farm and
// three load points, a 2-bus congested case, and a 3-bus triangle used to
// sanity-check shift factors.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sscuc/model.hpp"

namespace sscuc::cases {

inline SystemCase six_bus() {
  SystemCase sys;
  sys.buses = {1, 2, 3, 4, 5, 6};
  sys.slack_bus = 1;
  sys.horizon = 24;

  sys.lines = {
      {1, 1, 2, 0.170, 200.0}, {2, 2, 3, 0.037, 110.0}, {3, 3, 6, 0.018, 100.0},
      {4, 1, 4, 0.258, 100.0}, {5, 2, 4, 0.197, 100.0}, {6, 4, 5, 0.037, 100.0},
      {7, 5, 6, 0.140, 100.0}};

  ThermalUnit u1;
  u1.id = 1; u1.bus = 1;
  u1.p_min = 50.0; u1.p_max = 220.0;
  u1.ramp_up = 90.0; u1.ramp_down = 90.0;
  u1.min_on = 4; u1.min_off = 4;
  u1.initial_status = 8; u1.initial_output = 130.0;
  u1.cost_segments = {{120.0, 13.0}, {220.0, 16.0}};
  u1.no_load_cost = 150.0;
  u1.startup_cost = 200.0; u1.shutdown_cost = 50.0;
  u1.corrective_up = 12.0; u1.corrective_dn = 12.0;

  ThermalUnit u2;
  u2.id = 2; u2.bus = 2;
  u2.p_min = 10.0; u2.p_max = 100.0;
  u2.ramp_up = 60.0; u2.ramp_down = 60.0;
  u2.min_on = 2; u2.min_off = 2;
  u2.initial_status = -2; u2.initial_output = 0.0;
  u2.cost_segments = {{60.0, 25.0}, {100.0, 30.0}};
  u2.no_load_cost = 60.0;
  u2.startup_cost = 120.0; u2.shutdown_cost = 30.0;
  u2.corrective_up = 55.0; u2.corrective_dn = 55.0;

  ThermalUnit u3;
  u3.id = 3; u3.bus = 6;
  u3.p_min = 5.0; u3.p_max = 20.0;
  u3.ramp_up = 60.0; u3.ramp_down = 60.0;
  u3.min_on = 1; u3.min_off = 1;
  u3.initial_status = -1; u3.initial_output = 0.0;
  u3.cost_segments = {{20.0, 42.0}};
  u3.no_load_cost = 40.0;
  u3.startup_cost = 40.0; u3.shutdown_cost = 10.0;
  u3.corrective_up = 0.0; u3.corrective_dn = 0.0;

  sys.units = {u1, u2, u3};

  const std::vector<double> total = {
      166, 160, 156, 154, 155, 160, 170, 182, 195, 205, 212, 216,
      218, 217, 214, 211, 210, 213, 220, 218, 212, 200, 186, 172};
  const std::vector<std::pair<int, double>> shares = {{3, 0.35}, {4, 0.35}, {5, 0.30}};
  for (auto [bus, share] : shares) {
    LoadPoint lp;
    lp.bus = bus;
    lp.sigma_fraction = 0.03;
    for (double v : total) lp.hourly_mean.push_back(v * share);
    sys.loads.push_back(lp);
  }

  WindFarm wf;
  wf.bus = 5;
  wf.hourly_mean = {50, 52, 54, 56, 56, 54, 50, 44, 40, 36, 32, 30,
                    28, 28, 30, 32, 36, 40, 44, 48, 52, 54, 54, 52};
  wf.sigma_fraction = 0.25;
  sys.wind = {wf};

  for (double v : total) {
    sys.spinning_reserve_req.push_back(0.03 * v);
    sys.operating_reserve_req.push_back(0.05 * v);
  }
  sys.validate();
  return sys;
}

// Two buses joined by one limited line; the cheap unit sits behind the
// bottleneck, so the base dispatch always overloads it.
inline SystemCase tiny2() {
  SystemCase sys;
  sys.buses = {1, 2};
  sys.slack_bus = 1;
  sys.horizon = 4;
  sys.lines = {{1, 1, 2, 0.10, 100.0}};

  ThermalUnit u1;
  u1.id = 1; u1.bus = 1;
  u1.p_min = 10.0; u1.p_max = 200.0;
  u1.ramp_up = 200.0; u1.ramp_down = 200.0;
  u1.min_on = 1; u1.min_off = 1;
  u1.initial_status = 5; u1.initial_output = 100.0;
  u1.cost_segments = {{200.0, 10.0}};

  ThermalUnit u2;
  u2.id = 2; u2.bus = 2;
  u2.p_min = 20.0; u2.p_max = 100.0;
  u2.ramp_up = 100.0; u2.ramp_down = 100.0;
  u2.min_on = 1; u2.min_off = 1;
  u2.initial_status = -1; u2.initial_output = 0.0;
  u2.cost_segments = {{100.0, 30.0}};
  u2.startup_cost = 20.0;

  sys.units = {u1, u2};

  LoadPoint lp;
  lp.bus = 2;
  lp.hourly_mean.assign(4, 120.0);
  sys.loads = {lp};

  sys.spinning_reserve_req.assign(4, 0.0);
  sys.operating_reserve_req.assign(4, 0.0);
  sys.validate();
  return sys;
}

// Equal-reactance triangle with one generator; shift factors have a
// closed-form (2/3, 1/3 splits).
inline SystemCase triangle3() {
  SystemCase sys;
  sys.buses = {1, 2, 3};
  sys.slack_bus = 1;
  sys.horizon = 4;
  sys.lines = {{1, 1, 2, 0.10, 100.0}, {2, 1, 3, 0.10, 100.0},
               {3, 2, 3, 0.10, 100.0}};

  ThermalUnit u1;
  u1.id = 1; u1.bus = 1;
  u1.p_min = 5.0; u1.p_max = 300.0;
  u1.ramp_up = 300.0; u1.ramp_down = 300.0;
  u1.min_on = 1; u1.min_off = 1;
  u1.initial_status = 5; u1.initial_output = 100.0;
  u1.cost_segments = {{300.0, 20.0}};
  sys.units = {u1};

  LoadPoint l2, l3;
  l2.bus = 2;
  l2.hourly_mean.assign(4, 60.0);
  l3.bus = 3;
  l3.hourly_mean.assign(4, 40.0);
  sys.loads = {l2, l3};

  sys.spinning_reserve_req.assign(4, 0.0);
  sys.operating_reserve_req.assign(4, 0.0);
  sys.validate();
  return sys;
}

inline SystemCase builtin(const std::string& name) {
  if (name == "six_bus") return six_bus();
  if (name == "tiny2") return tiny2();
  if (name == "triangle3") return triangle3();
  throw ValidationError("unknown builtin case '" + name +
                        "' (expected six_bus, tiny2, or triangle3)");
}

}  // namespace sscuc::cases
