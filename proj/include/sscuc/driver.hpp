// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Benders loop orchestration: master UC -> hourly network checks -> hourly
// scenario checks over concentration points (or weighted scenarios) ->
// cuts -> repeat until no violated hour remains.

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sscuc/model.hpp"
#include "sscuc/optkernel.hpp"
#include "sscuc/pem.hpp"
#include "sscuc/scuc.hpp"
#include "sscuc/stochastic.hpp"

namespace sscuc {

enum class Mode { Deterministic, Tpe, Mcs };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Deterministic: return "deterministic";
    case Mode::Tpe: return "tpe";
    case Mode::Mcs: return "mcs";
  }
  return "?";
}

struct SolveOptions {
  double epsilon = 1e-3;       // MW threshold for s_t and mean S_t^c
  int max_iterations = 50;
  int mcs_samples = 10000;
  int mcs_reduced = 100;
  std::uint64_t seed = 1;
  double milp_gap = 1e-6;
  double redispatch_penalty = 2000.0;  // $/MWh on infeasibility slack
};

struct IterationSummary {
  int iteration = 0;
  double master_objective = 0.0;
  int network_violations = 0;   // violated hours
  int scenario_violations = 0;  // hours with weighted-mean S > eps
  int network_cuts = 0, scenario_cuts = 0;
  int subproblems = 0;  // NT + NT * points
};

struct SolveReport {
  Mode mode = Mode::Deterministic;
  bool converged = false;
  int iterations = 0;
  Schedule schedule;
  double master_cost = 0.0;    // objective value of the final master
  double expected_cost = 0.0;  // see mode-specific aggregation
  int n_points = 0;            // concentrations or reduced scenarios
  int network_cuts = 0, scenario_cuts = 0;
  long long subproblems = 0;
  std::vector<IterationSummary> history;
  std::vector<BendersCut> cuts;
  double wall_seconds = 0.0;  // excluded from serialized output by default
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& msg, SolveReport partial)
      : std::runtime_error(msg),
        report(std::make_shared<SolveReport>(std::move(partial))) {}
  std::shared_ptr<SolveReport> report;
};

// One weighted evaluation point of the uncertainty model.
struct WeightedRealization {
  double weight = 0.0;
  Realization real;
};

namespace detail {

// Core decomposition loop over an arbitrary weighted point list (empty = pure
// deterministic base case).
inline SolveReport run_benders(const SystemCase& sys, const NetworkModel& net,
                               const std::vector<WeightedRealization>& points,
                               const SolveOptions& opt, Mode mode) {
  auto t_start = std::chrono::steady_clock::now();
  const int nt = sys.horizon;
  SolveReport rep;
  rep.mode = mode;
  rep.n_points = static_cast<int>(points.size());

  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    MasterProblem mp = build_master(sys, rep.cuts);
    opt::Solution sol = opt::solve_milp(mp.lp, opt.milp_gap);
    if (sol.status != opt::Status::Optimal) {
      rep.iterations = iter;
      throw SolveError(
          std::string("master problem ") +
              (sol.status == opt::Status::Infeasible ? "is infeasible"
                                                     : "hit the node budget") +
              " at iteration " + std::to_string(iter),
          rep);
    }
    Schedule sched = mp.extract(sol);

    IterationSummary it;
    it.iteration = iter;
    it.master_objective = sol.objective;

    std::vector<BendersCut> fresh;
    for (int t = 0; t < nt; ++t) {
      CheckResult res = network_check(net, sys, sched, t, opt.epsilon);
      ++it.subproblems;
      if (res.violated) {
        ++it.network_violations;
        fresh.push_back(make_network_cut(res, net, sys, sched, iter));
        ++it.network_cuts;
      }
    }
    if (!points.empty()) {
      for (int t = 0; t < nt; ++t) {
        std::vector<std::pair<double, CheckResult>> results;
        results.reserve(points.size());
        double mean_obj = 0.0;
        for (const auto& wp : points) {
          CheckResult r = scenario_check(net, sys, sched, wp.real, t, opt.epsilon);
          ++it.subproblems;
          mean_obj += wp.weight * r.objective;
          results.push_back({wp.weight, std::move(r)});
        }
        if (mean_obj > opt.epsilon) {
          ++it.scenario_violations;
          fresh.push_back(make_scenario_cut(results, sys, sched, t, iter));
          ++it.scenario_cuts;
        }
      }
    }

    rep.iterations = iter;
    rep.subproblems += it.subproblems;
    rep.network_cuts += it.network_cuts;
    rep.scenario_cuts += it.scenario_cuts;
    rep.history.push_back(it);

    if (fresh.empty()) {
      rep.converged = true;
      rep.schedule = std::move(sched);
      rep.master_cost = sol.objective;
      break;
    }
    for (auto& c : fresh) rep.cuts.push_back(std::move(c));
  }

  if (!rep.converged)
    throw SolveError("no convergence within " +
                         std::to_string(opt.max_iterations) + " iterations",
                     rep);

  // Expected total cost: first weighted moment of the per-point full-day
  // re-dispatch costs; deterministic mode reports the master value itself.
  if (points.empty()) {
    rep.expected_cost = rep.master_cost;
  } else {
    std::vector<std::pair<double, double>> evals;
    evals.reserve(points.size());
    for (const auto& wp : points)
      evals.push_back({wp.weight, redispatch_cost(net, sys, rep.schedule, wp.real,
                                                  opt.redispatch_penalty)});
    rep.expected_cost = pem::estimate_moments(evals, 1).mean();
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rep;
}

inline Realization realization_from_deviates(
    const SystemCase& sys, const std::vector<stochastic::RandomVariable>& vars,
    const double* dev) {
  Realization r = Realization::forecast(sys);
  for (size_t v = 0; v < vars.size(); ++v) {
    if (vars[v].kind == stochastic::RandomVariable::Kind::Wind)
      r.wind_scale[vars[v].source] = dev[v];
    else
      r.load_scale[vars[v].source] = dev[v];
  }
  return r;
}

}  // namespace detail

inline SolveReport solve_deterministic(const SystemCase& sys,
                                       const SolveOptions& opt = {}) {
  NetworkModel net = compute_shift_factors(sys);
  return detail::run_benders(sys, net, {}, opt, Mode::Deterministic);
}

inline SolveReport solve_stochastic_tpe(const SystemCase& sys,
                                        const SolveOptions& opt = {}) {
  NetworkModel net = compute_shift_factors(sys);
  auto vars = stochastic::random_variables(sys);
  auto conc = pem::build_concentrations(stochastic::pem_inputs(sys));
  std::vector<WeightedRealization> points;
  points.reserve(conc.size());
  for (const auto& c : conc) {
    WeightedRealization wp;
    wp.weight = c.weight;
    wp.real = Realization::forecast(sys);
    const auto& v = vars[c.variable];
    if (v.kind == stochastic::RandomVariable::Kind::Wind)
      wp.real.wind_scale[v.source] = c.location;
    else
      wp.real.load_scale[v.source] = c.location;
    points.push_back(std::move(wp));
  }
  // All-zero sigma degenerates to the deterministic base case.
  return detail::run_benders(sys, net, points, opt, Mode::Tpe);
}

// Runs the stochastic loop on a caller-provided weighted scenario set
// (already reduced). Exposed for oracle tests and benchmark reuse.
inline SolveReport solve_with_scenarios(const SystemCase& sys,
                                        const stochastic::ScenarioSet& set,
                                        const SolveOptions& opt = {}) {
  NetworkModel net = compute_shift_factors(sys);
  auto vars = stochastic::random_variables(sys);
  if (set.n_vars != static_cast<int>(vars.size()))
    throw ValidationError("solve_with_scenarios: scenario set has " +
                          std::to_string(set.n_vars) + " variables, case has " +
                          std::to_string(vars.size()));
  std::vector<WeightedRealization> points;
  points.reserve(set.size());
  for (int s = 0; s < set.size(); ++s)
    points.push_back({set.prob[s],
                      detail::realization_from_deviates(sys, vars, set.scenario(s))});
  return detail::run_benders(sys, net, points, opt, Mode::Mcs);
}

inline SolveReport solve_stochastic_mcs(const SystemCase& sys,
                                        const SolveOptions& opt = {}) {
  if (opt.mcs_reduced > opt.mcs_samples)
    throw ValidationError("solve_stochastic_mcs: n_reduced exceeds n_samples");
  stochastic::ScenarioSet raw = stochastic::sample(sys, opt.mcs_samples, opt.seed);
  stochastic::ScenarioSet reduced = stochastic::reduce(raw, opt.mcs_reduced);
  return solve_with_scenarios(sys, reduced, opt);
}

// --- Serialization ------------------------------------------------------------

inline nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json j;
  j["total_cost"] = s.total_cost;
  j["commit"] = nlohmann::json::array();
  j["dispatch_mw"] = nlohmann::json::array();
  j["spin_reserve_mw"] = nlohmann::json::array();
  j["oper_reserve_mw"] = nlohmann::json::array();
  for (int i = 0; i < s.num_units(); ++i) {
    std::vector<int> row(s.commit[i].begin(), s.commit[i].end());
    j["commit"].push_back(row);
    j["dispatch_mw"].push_back(s.dispatch[i]);
    j["spin_reserve_mw"].push_back(s.spin_reserve[i]);
    j["oper_reserve_mw"].push_back(s.oper_reserve[i]);
  }
  return j;
}

inline Schedule schedule_from_json(const nlohmann::json& j) {
  Schedule s;
  s.total_cost = j.at("total_cost").get<double>();
  auto commit = j.at("commit").get<std::vector<std::vector<int>>>();
  for (const auto& row : commit)
    s.commit.emplace_back(row.begin(), row.end());
  j.at("dispatch_mw").get_to(s.dispatch);
  j.at("spin_reserve_mw").get_to(s.spin_reserve);
  j.at("oper_reserve_mw").get_to(s.oper_reserve);
  int ng = s.num_units(), nt = s.horizon();
  s.startup_cost.assign(ng, std::vector<double>(nt, 0.0));
  s.shutdown_cost.assign(ng, std::vector<double>(nt, 0.0));
  if (j.contains("startup_cost")) j.at("startup_cost").get_to(s.startup_cost);
  if (j.contains("shutdown_cost")) j.at("shutdown_cost").get_to(s.shutdown_cost);
  return s;
}

// Wall-clock time is intentionally omitted unless requested: serialized
// reports must be byte-identical across runs with the same seed/config.
inline nlohmann::json report_to_json(const SolveReport& r,
                                     bool include_timing = false) {
  nlohmann::json j;
  j["mode"] = mode_name(r.mode);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["master_cost"] = r.master_cost;
  j["expected_cost"] = r.expected_cost;
  j["n_points"] = r.n_points;
  j["network_cuts"] = r.network_cuts;
  j["scenario_cuts"] = r.scenario_cuts;
  j["subproblems"] = r.subproblems;
  j["history"] = nlohmann::json::array();
  for (const auto& it : r.history)
    j["history"].push_back({{"iteration", it.iteration},
                            {"master_objective", it.master_objective},
                            {"network_violations", it.network_violations},
                            {"scenario_violations", it.scenario_violations},
                            {"network_cuts", it.network_cuts},
                            {"scenario_cuts", it.scenario_cuts},
                            {"subproblems", it.subproblems}});
  j["schedule"] = schedule_to_json(r.schedule);
  if (include_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

inline void write_schedule_csv(const Schedule& s, std::ostream& os) {
  os << "unit,hour,committed,dispatch_mw\n";
  os.precision(10);
  for (int i = 0; i < s.num_units(); ++i)
    for (int t = 0; t < s.horizon(); ++t)
      os << (i + 1) << ',' << (t + 1) << ',' << (s.on(i, t) ? 1 : 0) << ','
         << s.dispatch[i][t] << '\n';
}

}  // namespace sscuc
