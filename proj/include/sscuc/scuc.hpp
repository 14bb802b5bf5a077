// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// SCUC formulation pieces: the master unit-commitment MILP (with
// accumulated Benders cuts), the hourly network-check LP and its
// feasibility cut, and the hourly scenario-check LP and its cut.

#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sscuc/model.hpp"
#include "sscuc/optkernel.hpp"

namespace sscuc {

class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& m) : std::logic_error(m) {}
};

class DegenerateCutError : public std::runtime_error {
 public:
  explicit DegenerateCutError(const std::string& m) : std::runtime_error(m) {}
};

struct Schedule {
  // All matrices are unit-major: [unit][hour].
  std::vector<std::vector<char>> commit;
  std::vector<std::vector<double>> dispatch;      // MW
  std::vector<std::vector<double>> spin_reserve;  // MW
  std::vector<std::vector<double>> oper_reserve;  // MW
  std::vector<std::vector<double>> startup_cost;  // $
  std::vector<std::vector<double>> shutdown_cost; // $
  double total_cost = 0.0;

  int num_units() const { return static_cast<int>(commit.size()); }
  int horizon() const { return commit.empty() ? 0 : static_cast<int>(commit[0].size()); }

  bool on(int i, int t) const { return commit[i][t] != 0; }

  // Recomputes the objective from case data; must agree with total_cost.
  double recompute_cost(const SystemCase& sys) const {
    double c = 0.0;
    for (int i = 0; i < num_units(); ++i) {
      const auto& u = sys.units[i];
      for (int t = 0; t < horizon(); ++t) {
        if (on(i, t)) c += u.energy_cost(dispatch[i][t]) + u.no_load_cost;
        c += startup_cost[i][t] + shutdown_cost[i][t];
      }
    }
    return c;
  }
};

enum class CutKind { Network, Scenario };

// Affine inequality over the master's (P_it, I_it) at one hour:
//   sum_i p_coeff[i] * P_it + sum_i i_coeff[i] * I_it <= rhs.
struct BendersCut {
  int hour = 0;
  CutKind kind = CutKind::Network;
  std::vector<double> p_coeff, i_coeff;
  double rhs = 0.0;
  int source_iteration = 0;

  // LHS - rhs at a schedule; at the producing schedule this equals the
  // subproblem objective that generated the cut.
  double violation(const Schedule& s) const {
    double lhs = 0.0;
    for (size_t i = 0; i < p_coeff.size(); ++i) {
      lhs += p_coeff[i] * s.dispatch[i][hour];
      lhs += i_coeff[i] * (s.on(static_cast<int>(i), hour) ? 1.0 : 0.0);
    }
    return lhs - rhs;
  }
};

struct CheckResult {
  int hour = 0;
  double objective = 0.0;  // s_t or S_t^c
  double slack_line = 0.0, slack_shortage = 0.0, slack_surplus = 0.0;  // MW
  // Network check: per-line duals on the two flow-direction blocks.
  std::vector<double> lambda1, lambda2;
  // Scenario check: per-unit duals (corrective ramp and capacity rows).
  std::vector<double> lambda1_unit, lambda2_unit, mu1_unit, mu2_unit;
  bool violated = false;
};

// Multiplicative deviates applied to the mean profiles; one entry per wind
// farm and per load point.
struct Realization {
  std::vector<double> wind_scale, load_scale;

  static Realization forecast(const SystemCase& sys) {
    Realization r;
    r.wind_scale.assign(sys.num_wind(), 1.0);
    r.load_scale.assign(sys.num_loads(), 1.0);
    return r;
  }

  double load_at(const SystemCase& sys, int k, int t) const {
    return sys.loads[k].hourly_mean[t] * load_scale[k];
  }
  double wind_at(const SystemCase& sys, int w, int t) const {
    return sys.wind[w].hourly_mean[t] * wind_scale[w];
  }
  double total_load(const SystemCase& sys, int t) const {
    double v = 0.0;
    for (int k = 0; k < sys.num_loads(); ++k) v += load_at(sys, k, t);
    return v;
  }
  double total_wind(const SystemCase& sys, int t) const {
    double v = 0.0;
    for (int w = 0; w < sys.num_wind(); ++w) v += wind_at(sys, w, t);
    return v;
  }
};

// --- Master problem ----------------------------------------------------------

struct MasterProblem {
  opt::LinearProgram lp;
  const SystemCase* sys = nullptr;
  // Variable index maps, [unit][hour].
  std::vector<std::vector<int>> vI, vP, vSU, vSD, vRS, vRO;

  Schedule extract(const opt::Solution& sol) const {
    const int ng = sys->num_units(), nt = sys->horizon;
    Schedule s;
    s.commit.assign(ng, std::vector<char>(nt, 0));
    s.dispatch.assign(ng, std::vector<double>(nt, 0.0));
    s.spin_reserve.assign(ng, std::vector<double>(nt, 0.0));
    s.oper_reserve.assign(ng, std::vector<double>(nt, 0.0));
    s.startup_cost.assign(ng, std::vector<double>(nt, 0.0));
    s.shutdown_cost.assign(ng, std::vector<double>(nt, 0.0));
    for (int i = 0; i < ng; ++i)
      for (int t = 0; t < nt; ++t) {
        bool on = sol.x[vI[i][t]] > 0.5;
        s.commit[i][t] = on ? 1 : 0;
        s.dispatch[i][t] = on ? sol.x[vP[i][t]] : 0.0;
        s.spin_reserve[i][t] = sol.x[vRS[i][t]];
        s.oper_reserve[i][t] = sol.x[vRO[i][t]];
        s.startup_cost[i][t] = sol.x[vSU[i][t]];
        s.shutdown_cost[i][t] = sol.x[vSD[i][t]];
      }
    s.total_cost = sol.objective;
    return s;
  }
};

inline MasterProblem build_master(const SystemCase& sys,
                                  const std::vector<BendersCut>& cuts) {
  const int ng = sys.num_units(), nt = sys.horizon;
  const double inf = opt::kInf;

  // Structural adequacy: the fleet must be able to carry net load plus the
  // reserve requirement in every hour.
  {
    double cap = 0.0;
    for (const auto& u : sys.units) cap += u.p_max;
    for (int t = 0; t < nt; ++t) {
      double need = sys.total_load(t) - sys.total_wind(t) +
                    std::max(sys.spinning_reserve_req[t], sys.operating_reserve_req[t]);
      if (cap + 1e-9 < need)
        throw ValidationError("build_master: reserve requirement exceeds fleet "
                              "capability at hour " + std::to_string(t));
    }
  }

  MasterProblem mp;
  mp.sys = &sys;
  auto& lp = mp.lp;
  auto grid = [&](std::vector<std::vector<int>>& m) {
    m.assign(ng, std::vector<int>(nt, -1));
  };
  grid(mp.vI); grid(mp.vP); grid(mp.vSU); grid(mp.vSD); grid(mp.vRS); grid(mp.vRO);

  std::vector<std::vector<std::vector<int>>> vSeg(ng);

  for (int i = 0; i < ng; ++i) {
    const auto& u = sys.units[i];
    vSeg[i].assign(nt, {});

    // Hours forced by the initial min-up/down state.
    int force_on = 0, force_off = 0;
    if (u.initially_on() && u.initial_status < u.min_on)
      force_on = u.min_on - u.initial_status;
    if (!u.initially_on() && -u.initial_status < u.min_off)
      force_off = u.min_off + u.initial_status;

    for (int t = 0; t < nt; ++t) {
      double ilo = 0.0, ihi = 1.0;
      if (t < force_on) ilo = 1.0;
      if (t < force_off) ihi = 0.0;
      mp.vI[i][t] = lp.add_var(ilo, ihi, u.no_load_cost, true);
      mp.vP[i][t] = lp.add_var(0.0, u.p_max, 0.0);
      mp.vSU[i][t] = lp.add_var(0.0, inf, 1.0);
      mp.vSD[i][t] = lp.add_var(0.0, inf, 1.0);
      mp.vRS[i][t] = lp.add_var(0.0, u.corrective_up_mw(), 0.0);
      mp.vRO[i][t] = lp.add_var(0.0, u.p_max, 0.0);
      double prev_bp = 0.0;
      for (const auto& seg : u.cost_segments) {
        double width = std::min(seg.breakpoint, u.p_max) - prev_bp;
        if (width <= 0) break;
        vSeg[i][t].push_back(lp.add_var(0.0, width, seg.marginal_cost));
        prev_bp = std::min(seg.breakpoint, u.p_max);
      }
    }
  }

  for (int i = 0; i < ng; ++i) {
    const auto& u = sys.units[i];
    const double i0 = u.initially_on() ? 1.0 : 0.0;
    const double p0 = u.initially_on() ? u.initial_output : 0.0;

    for (int t = 0; t < nt; ++t) {
      // Dispatch equals the segment sum; limits tie it to commitment.
      std::vector<std::pair<int, double>> segsum{{mp.vP[i][t], 1.0}};
      for (int sv : vSeg[i][t]) segsum.push_back({sv, -1.0});
      lp.add_row(std::move(segsum), opt::Sense::EQ, 0.0);
      lp.add_row({{mp.vP[i][t], 1.0}, {mp.vI[i][t], -u.p_max}}, opt::Sense::LE, 0.0);
      lp.add_row({{mp.vI[i][t], u.p_min}, {mp.vP[i][t], -1.0}}, opt::Sense::LE, 0.0);

      // Startup/shutdown cost linearization.
      if (t == 0) {
        lp.add_row({{mp.vI[i][t], u.startup_cost}, {mp.vSU[i][t], -1.0}},
                   opt::Sense::LE, u.startup_cost * i0);
        lp.add_row({{mp.vI[i][t], -u.shutdown_cost}, {mp.vSD[i][t], -1.0}},
                   opt::Sense::LE, -u.shutdown_cost * i0);
      } else {
        lp.add_row({{mp.vI[i][t], u.startup_cost}, {mp.vI[i][t - 1], -u.startup_cost},
                    {mp.vSU[i][t], -1.0}}, opt::Sense::LE, 0.0);
        lp.add_row({{mp.vI[i][t - 1], u.shutdown_cost}, {mp.vI[i][t], -u.shutdown_cost},
                    {mp.vSD[i][t], -1.0}}, opt::Sense::LE, 0.0);
      }

      // Ramping with the startup/shutdown-aware limits: a starting unit may
      // only reach p_min, a stopping unit must already sit at or below it.
      if (t == 0) {
        lp.add_row({{mp.vP[i][t], 1.0}, {mp.vI[i][t], -u.p_min}}, opt::Sense::LE,
                   p0 + (u.ramp_up - u.p_min) * i0);
        lp.add_row({{mp.vP[i][t], -1.0}, {mp.vI[i][t], -(u.ramp_down - u.p_min)}},
                   opt::Sense::LE, u.p_min - p0);
      } else {
        lp.add_row({{mp.vP[i][t], 1.0}, {mp.vP[i][t - 1], -1.0},
                    {mp.vI[i][t - 1], -(u.ramp_up - u.p_min)}, {mp.vI[i][t], -u.p_min}},
                   opt::Sense::LE, 0.0);
        lp.add_row({{mp.vP[i][t - 1], 1.0}, {mp.vP[i][t], -1.0},
                    {mp.vI[i][t], -(u.ramp_down - u.p_min)}},
                   opt::Sense::LE, u.p_min);
      }

      // Minimum up/down windows.
      for (int tau = t + 1; tau < std::min(t + u.min_on, nt); ++tau) {
        if (t == 0)
          lp.add_row({{mp.vI[i][0], 1.0}, {mp.vI[i][tau], -1.0}}, opt::Sense::LE, i0);
        else
          lp.add_row({{mp.vI[i][t], 1.0}, {mp.vI[i][t - 1], -1.0}, {mp.vI[i][tau], -1.0}},
                     opt::Sense::LE, 0.0);
      }
      for (int tau = t + 1; tau < std::min(t + u.min_off, nt); ++tau) {
        if (t == 0)
          lp.add_row({{mp.vI[i][tau], 1.0}, {mp.vI[i][0], -1.0}}, opt::Sense::LE,
                     1.0 - i0);
        else
          lp.add_row({{mp.vI[i][t - 1], 1.0}, {mp.vI[i][t], -1.0}, {mp.vI[i][tau], 1.0}},
                     opt::Sense::LE, 1.0);
      }

      // Reserves cannot exceed remaining headroom.
      lp.add_row({{mp.vP[i][t], 1.0}, {mp.vRS[i][t], 1.0}, {mp.vI[i][t], -u.p_max}},
                 opt::Sense::LE, 0.0);
      lp.add_row({{mp.vP[i][t], 1.0}, {mp.vRO[i][t], 1.0}, {mp.vI[i][t], -u.p_max}},
                 opt::Sense::LE, 0.0);
    }
  }

  for (int t = 0; t < nt; ++t) {
    // Power balance at forecast (MPV) wind and load.
    std::vector<std::pair<int, double>> bal;
    for (int i = 0; i < ng; ++i) bal.push_back({mp.vP[i][t], 1.0});
    lp.add_row(std::move(bal), opt::Sense::EQ, sys.total_load(t) - sys.total_wind(t));

    std::vector<std::pair<int, double>> rs, ro;
    for (int i = 0; i < ng; ++i) {
      rs.push_back({mp.vRS[i][t], 1.0});
      ro.push_back({mp.vRO[i][t], 1.0});
    }
    lp.add_row(std::move(rs), opt::Sense::GE, sys.spinning_reserve_req[t]);
    lp.add_row(std::move(ro), opt::Sense::GE, sys.operating_reserve_req[t]);
  }

  for (const auto& cut : cuts) {
    if (cut.hour < 0 || cut.hour >= nt ||
        static_cast<int>(cut.p_coeff.size()) != ng)
      throw ContractError("build_master: cut references unknown unit/hour indices");
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < ng; ++i) {
      if (cut.p_coeff[i] != 0.0) row.push_back({mp.vP[i][cut.hour], cut.p_coeff[i]});
      if (cut.i_coeff[i] != 0.0) row.push_back({mp.vI[i][cut.hour], cut.i_coeff[i]});
    }
    lp.add_row(std::move(row), opt::Sense::LE, cut.rhs);
  }

  return mp;
}

// --- Hourly network check (base case) ----------------------------------------

// Bus injections of a schedule at hour t under a realization.
inline std::vector<double> bus_injections(const NetworkModel& net,
                                          const SystemCase& sys,
                                          const std::vector<double>& unit_output,
                                          const Realization& r, int t) {
  std::vector<double> inj(net.n_buses, 0.0);
  for (int i = 0; i < sys.num_units(); ++i) inj[net.unit_bus[i]] += unit_output[i];
  for (int w = 0; w < sys.num_wind(); ++w) inj[net.wind_bus[w]] += r.wind_at(sys, w, t);
  for (int k = 0; k < sys.num_loads(); ++k) inj[net.load_bus[k]] -= r.load_at(sys, k, t);
  return inj;
}

inline CheckResult network_check(const NetworkModel& net, const SystemCase& sys,
                                 const Schedule& sched, int t,
                                 double eps = 1e-3) {
  std::vector<double> out(sys.num_units());
  for (int i = 0; i < sys.num_units(); ++i) out[i] = sched.dispatch[i][t];
  auto inj = bus_injections(net, sys, out, Realization::forecast(sys), t);
  auto flows = net.flows(inj);

  opt::LinearProgram lp;
  int s = lp.add_var(0.0, opt::kInf, 1.0);
  std::vector<int> fwd_rows, rev_rows;
  for (int l = 0; l < net.n_lines; ++l) {
    double cap = sys.lines[l].flow_limit;
    fwd_rows.push_back(lp.add_row({{s, -1.0}}, opt::Sense::LE, cap - flows[l]));
    rev_rows.push_back(lp.add_row({{s, -1.0}}, opt::Sense::LE, cap + flows[l]));
  }
  opt::Solution sol = opt::solve_lp(lp);
  if (!sol.optimal())
    throw std::runtime_error("network_check: slack LP did not solve");

  CheckResult res;
  res.hour = t;
  res.objective = sol.objective;
  res.slack_line = sol.objective;
  res.lambda1.resize(net.n_lines);
  res.lambda2.resize(net.n_lines);
  for (int l = 0; l < net.n_lines; ++l) {
    res.lambda1[l] = sol.duals[fwd_rows[l]];
    res.lambda2[l] = sol.duals[rev_rows[l]];
  }
  res.violated = res.objective > eps;
  return res;
}

// Feasibility cut from the network check: the subgradient of s_t with
// respect to unit dispatch is (lambda1 - lambda2)' * SF * K_P.
inline BendersCut make_network_cut(const CheckResult& res, const NetworkModel& net,
                                   const SystemCase& sys, const Schedule& sched,
                                   int iteration) {
  if (!res.violated)
    throw ContractError("make_network_cut: called on a non-violated result");
  const int ng = sys.num_units();
  BendersCut cut;
  cut.hour = res.hour;
  cut.kind = CutKind::Network;
  cut.source_iteration = iteration;
  cut.p_coeff.assign(ng, 0.0);
  cut.i_coeff.assign(ng, 0.0);

  double norm = 0.0;
  double rhs = -res.objective;
  for (int i = 0; i < ng; ++i) {
    double g = 0.0;
    for (int l = 0; l < net.n_lines; ++l)
      g += (res.lambda1[l] - res.lambda2[l]) * net.shift(l, net.unit_bus[i]);
    cut.p_coeff[i] = g;
    rhs += g * sched.dispatch[i][res.hour];
    norm = std::max(norm, std::fabs(g));
  }
  cut.rhs = rhs;
  if (norm < 1e-12)
    throw DegenerateCutError(
        "make_network_cut: all-zero dual subgradient at hour " +
        std::to_string(res.hour) + "; no dispatch change can relieve the overload");
  return cut;
}

// --- Hourly scenario check ----------------------------------------------------

inline CheckResult scenario_check(const NetworkModel& net, const SystemCase& sys,
                                  const Schedule& sched, const Realization& real,
                                  int t, double eps = 1e-3) {
  const int ng = sys.num_units(), nw = sys.num_wind();
  opt::LinearProgram lp;

  std::vector<int> pc(ng);
  for (int i = 0; i < ng; ++i) pc[i] = lp.add_var(0.0, opt::kInf, 0.0);
  // Wind is curtailable at no cost: spilling surplus is an operating action,
  // not a violation.
  std::vector<int> cw(nw);
  for (int w = 0; w < nw; ++w)
    cw[w] = lp.add_var(0.0, std::max(0.0, real.wind_at(sys, w, t)), 0.0);
  int s_line = lp.add_var(0.0, opt::kInf, 1.0);
  int s_short = lp.add_var(0.0, opt::kInf, 1.0);
  int s_surp = lp.add_var(0.0, opt::kInf, 1.0);

  // Line constraints at the realized load/wind.
  std::vector<double> base_flow(net.n_lines, 0.0);
  for (int l = 0; l < net.n_lines; ++l) {
    double f = 0.0;
    for (int w = 0; w < sys.num_wind(); ++w)
      f += net.shift(l, net.wind_bus[w]) * real.wind_at(sys, w, t);
    for (int k = 0; k < sys.num_loads(); ++k)
      f -= net.shift(l, net.load_bus[k]) * real.load_at(sys, k, t);
    base_flow[l] = f;
  }
  for (int l = 0; l < net.n_lines; ++l) {
    double cap = sys.lines[l].flow_limit;
    std::vector<std::pair<int, double>> fwd{{s_line, -1.0}}, rev{{s_line, -1.0}};
    for (int i = 0; i < ng; ++i) {
      double sf = net.shift(l, net.unit_bus[i]);
      if (sf != 0.0) {
        fwd.push_back({pc[i], sf});
        rev.push_back({pc[i], -sf});
      }
    }
    for (int w = 0; w < nw; ++w) {
      double sf = net.shift(l, net.wind_bus[w]);
      if (sf != 0.0) {
        fwd.push_back({cw[w], -sf});
        rev.push_back({cw[w], sf});
      }
    }
    lp.add_row(std::move(fwd), opt::Sense::LE, cap - base_flow[l]);
    lp.add_row(std::move(rev), opt::Sense::LE, cap + base_flow[l]);
  }

  // Realized power balance with shortage/surplus slacks; curtailment adds
  // back to the net load.
  {
    std::vector<std::pair<int, double>> bal{{s_short, 1.0}, {s_surp, -1.0}};
    for (int i = 0; i < ng; ++i) bal.push_back({pc[i], 1.0});
    for (int w = 0; w < nw; ++w) bal.push_back({cw[w], -1.0});
    lp.add_row(std::move(bal), opt::Sense::EQ,
               real.total_load(sys, t) - real.total_wind(sys, t));
  }

  // Corrective ramp band and committed-capacity rows (dual carriers).
  std::vector<int> r_up(ng), r_dn(ng), r_cap(ng), r_floor(ng);
  for (int i = 0; i < ng; ++i) {
    const auto& u = sys.units[i];
    double ihat = sched.on(i, t) ? 1.0 : 0.0;
    double phat = sched.dispatch[i][t];
    r_up[i] = lp.add_row({{pc[i], 1.0}}, opt::Sense::LE,
                         phat + u.corrective_up_mw() * ihat);
    r_dn[i] = lp.add_row({{pc[i], -1.0}}, opt::Sense::LE,
                         -phat + u.corrective_dn_mw() * ihat);
    r_cap[i] = lp.add_row({{pc[i], 1.0}}, opt::Sense::LE, u.p_max * ihat);
    r_floor[i] = lp.add_row({{pc[i], -1.0}}, opt::Sense::LE, -u.p_min * ihat);
  }

  opt::Solution sol = opt::solve_lp(lp);
  if (!sol.optimal())
    throw std::runtime_error("scenario_check: slack LP did not solve at hour " +
                             std::to_string(t));

  CheckResult res;
  res.hour = t;
  res.objective = sol.objective;
  res.slack_line = sol.x[s_line];
  res.slack_shortage = sol.x[s_short];
  res.slack_surplus = sol.x[s_surp];
  res.lambda1_unit.resize(ng);
  res.lambda2_unit.resize(ng);
  res.mu1_unit.resize(ng);
  res.mu2_unit.resize(ng);
  for (int i = 0; i < ng; ++i) {
    res.lambda1_unit[i] = sol.duals[r_up[i]];
    res.lambda2_unit[i] = sol.duals[r_dn[i]];
    res.mu1_unit[i] = sol.duals[r_cap[i]];
    res.mu2_unit[i] = sol.duals[r_floor[i]];
  }
  res.violated = res.objective > eps;
  return res;
}

// Benders cut from probability-weighted scenario-check results at one hour.
// Duals and objectives are averaged under the given weights, producing one
// expected-feasibility cut per hour per iteration.
inline BendersCut make_scenario_cut(
    const std::vector<std::pair<double, CheckResult>>& results,
    const SystemCase& sys, const Schedule& sched, int t, int iteration) {
  if (results.empty()) throw ContractError("make_scenario_cut: empty result list");
  double wsum = 0.0;
  for (const auto& [w, r] : results) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw ContractError("make_scenario_cut: weights sum to " + std::to_string(wsum));

  const int ng = sys.num_units();
  std::vector<double> l1(ng, 0.0), l2(ng, 0.0), m1(ng, 0.0), m2(ng, 0.0);
  double mean_obj = 0.0;
  for (const auto& [w, r] : results) {
    mean_obj += w * r.objective;
    for (int i = 0; i < ng; ++i) {
      l1[i] += w * r.lambda1_unit[i];
      l2[i] += w * r.lambda2_unit[i];
      m1[i] += w * r.mu1_unit[i];
      m2[i] += w * r.mu2_unit[i];
    }
  }

  BendersCut cut;
  cut.hour = t;
  cut.kind = CutKind::Scenario;
  cut.source_iteration = iteration;
  cut.p_coeff.assign(ng, 0.0);
  cut.i_coeff.assign(ng, 0.0);
  double rhs = -mean_obj;
  double norm = 0.0;
  for (int i = 0; i < ng; ++i) {
    const auto& u = sys.units[i];
    // dS/dP_hat = -(l1 - l2); dS/dI_hat = -(l1 R_up + l2 R_dn + m1 Pmax - m2 Pmin)
    cut.p_coeff[i] = -(l1[i] - l2[i]);
    cut.i_coeff[i] = -(l1[i] * u.corrective_up_mw() + l2[i] * u.corrective_dn_mw() +
                       m1[i] * u.p_max - m2[i] * u.p_min);
    rhs += cut.p_coeff[i] * sched.dispatch[i][t];
    rhs += cut.i_coeff[i] * (sched.on(i, t) ? 1.0 : 0.0);
    norm = std::max({norm, std::fabs(cut.p_coeff[i]), std::fabs(cut.i_coeff[i])});
  }
  cut.rhs = rhs;
  if (norm < 1e-12)
    throw DegenerateCutError("make_scenario_cut: all-zero dual subgradient at hour " +
                             std::to_string(t));
  return cut;
}

// Cost-minimal corrective re-dispatch of a fixed schedule for a full day
// under one realization; infeasibility slacks carry a high energy penalty.
// Returns the full day cost: corrective energy plus the schedule's
// commitment costs.
inline double redispatch_cost(const NetworkModel& net, const SystemCase& sys,
                              const Schedule& sched, const Realization& real,
                              double slack_penalty = 2000.0) {
  const int ng = sys.num_units();
  double total = 0.0;
  for (int t = 0; t < sys.horizon; ++t) {
    opt::LinearProgram lp;
    std::vector<int> pc(ng);
    std::vector<std::vector<int>> seg(ng);
    for (int i = 0; i < ng; ++i) {
      const auto& u = sys.units[i];
      double ihat = sched.on(i, t) ? 1.0 : 0.0;
      double phat = sched.dispatch[i][t];
      double lo = std::max(u.p_min, phat - u.corrective_dn_mw()) * ihat;
      double hi = std::min(u.p_max, phat + u.corrective_up_mw()) * ihat;
      if (lo > hi) lo = hi;
      pc[i] = lp.add_var(lo, hi, 0.0);
      double prev = 0.0;
      for (const auto& cs : u.cost_segments) {
        double width = std::min(cs.breakpoint, u.p_max) - prev;
        if (width <= 0) break;
        seg[i].push_back(lp.add_var(0.0, width, cs.marginal_cost));
        prev = std::min(cs.breakpoint, u.p_max);
      }
      std::vector<std::pair<int, double>> tie{{pc[i], 1.0}};
      for (int sv : seg[i]) tie.push_back({sv, -1.0});
      lp.add_row(std::move(tie), opt::Sense::EQ, 0.0);
    }
    int s_line = lp.add_var(0.0, opt::kInf, slack_penalty);
    int s_short = lp.add_var(0.0, opt::kInf, slack_penalty);
    int s_surp = lp.add_var(0.0, opt::kInf, slack_penalty);
    std::vector<int> cw(sys.num_wind());
    for (int w = 0; w < sys.num_wind(); ++w)
      cw[w] = lp.add_var(0.0, std::max(0.0, real.wind_at(sys, w, t)), 0.0);

    for (int l = 0; l < net.n_lines; ++l) {
      double base = 0.0;
      for (int w = 0; w < sys.num_wind(); ++w)
        base += net.shift(l, net.wind_bus[w]) * real.wind_at(sys, w, t);
      for (int k = 0; k < sys.num_loads(); ++k)
        base -= net.shift(l, net.load_bus[k]) * real.load_at(sys, k, t);
      double cap = sys.lines[l].flow_limit;
      std::vector<std::pair<int, double>> fwd{{s_line, -1.0}}, rev{{s_line, -1.0}};
      for (int i = 0; i < ng; ++i) {
        double sf = net.shift(l, net.unit_bus[i]);
        if (sf != 0.0) {
          fwd.push_back({pc[i], sf});
          rev.push_back({pc[i], -sf});
        }
      }
      for (int w = 0; w < sys.num_wind(); ++w) {
        double sf = net.shift(l, net.wind_bus[w]);
        if (sf != 0.0) {
          fwd.push_back({cw[w], -sf});
          rev.push_back({cw[w], sf});
        }
      }
      lp.add_row(std::move(fwd), opt::Sense::LE, cap - base);
      lp.add_row(std::move(rev), opt::Sense::LE, cap + base);
    }
    std::vector<std::pair<int, double>> bal{{s_short, 1.0}, {s_surp, -1.0}};
    for (int i = 0; i < ng; ++i) bal.push_back({pc[i], 1.0});
    for (int w = 0; w < sys.num_wind(); ++w) bal.push_back({cw[w], -1.0});
    lp.add_row(std::move(bal), opt::Sense::EQ,
               real.total_load(sys, t) - real.total_wind(sys, t));

    opt::Solution sol = opt::solve_lp(lp);
    if (!sol.optimal())
      throw std::runtime_error("redispatch_cost: hour LP did not solve");
    total += sol.objective;
  }
  for (int i = 0; i < ng; ++i)
    for (int t = 0; t < sys.horizon; ++t) {
      if (sched.on(i, t)) total += sys.units[i].no_load_cost;
      total += sched.startup_cost[i][t] + sched.shutdown_cost[i][t];
    }
  return total;
}

}  // namespace sscuc
