// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Post-hoc out-of-sample evaluation of a fixed schedule: the Corrective
// Actions Incapability (CAI) index and the Extra Spinning Cost (ESC) ratio
// under a fresh Monte-Carlo simulation of the delivery day.

#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "sscuc/model.hpp"
#include "sscuc/scuc.hpp"
#include "sscuc/stochastic.hpp"

namespace sscuc::eval {

struct EvaluationReport {
  double cai = 0.0;  // in [0, 1]
  std::vector<double> hour_violation_prob;
  int samples = 0;
  std::uint64_t seed = 0;
};

struct CaiOptions {
  double epsilon = 1e-3;  // MW slack tolerated in the corrective LP
  // Literal aggregate-band test only; skips the network-feasibility LP.
  bool aggregate_only = false;
};

// One hour of one scenario is "satisfiable" when the realized mismatch fits
// inside the fleet's aggregate corrective band and (unless aggregate_only)
// a network-feasible corrective dispatch exists. A scenario counts as
// satisfied only when every hour is.
inline EvaluationReport cai(const SystemCase& sys, const NetworkModel& net,
                            const Schedule& sched,
                            const stochastic::ScenarioSet& scenarios,
                            const CaiOptions& opt = {}) {
  if (scenarios.size() == 0)
    throw std::invalid_argument("cai: empty scenario set");
  auto vars = stochastic::random_variables(sys);
  if (scenarios.n_vars != static_cast<int>(vars.size()))
    throw std::invalid_argument("cai: scenario set does not match the case");

  const int nt = sys.horizon, ng = sys.num_units();
  EvaluationReport rep;
  rep.samples = scenarios.size();
  rep.seed = scenarios.seed;
  rep.hour_violation_prob.assign(nt, 0.0);

  double unsatisfied_prob = 0.0;
  for (int s = 0; s < scenarios.size(); ++s) {
    Realization real = Realization::forecast(sys);
    const double* dev = scenarios.scenario(s);
    for (size_t v = 0; v < vars.size(); ++v) {
      if (vars[v].kind == stochastic::RandomVariable::Kind::Wind)
        real.wind_scale[vars[v].source] = dev[v];
      else
        real.load_scale[vars[v].source] = dev[v];
    }

    bool all_ok = true;
    for (int t = 0; t < nt; ++t) {
      double up_band = 0.0, dn_band = 0.0, committed_output = 0.0;
      for (int i = 0; i < ng; ++i) {
        if (!sched.on(i, t)) continue;
        const auto& u = sys.units[i];
        up_band += u.corrective_up_mw();
        dn_band += u.corrective_dn_mw();
        committed_output += sched.dispatch[i][t];
      }
      // Shortage > 0 means realized load exceeds scheduled supply and units
      // must ramp up; a deficit on the other side is absorbed by ramping
      // down and, beyond that, free wind curtailment.
      double shortage =
          real.total_load(sys, t) - real.total_wind(sys, t) - committed_output;
      double curtailable = std::max(0.0, real.total_wind(sys, t));
      bool hour_ok =
          shortage <= up_band + 1e-9 && -shortage <= dn_band + curtailable + 1e-9;
      if (hour_ok && !opt.aggregate_only) {
        CheckResult r = scenario_check(net, sys, sched, real, t, opt.epsilon);
        hour_ok = r.objective <= opt.epsilon;
      }
      if (!hour_ok) {
        rep.hour_violation_prob[t] += scenarios.prob[s];
        all_ok = false;
      }
    }
    if (!all_ok) unsatisfied_prob += scenarios.prob[s];
  }
  rep.cai = unsatisfied_prob;
  return rep;
}

// ESC: no-load cost of unit-hours committed by schedule_new but not by
// schedule_base, as a fraction of schedule_new's total generation cost.
inline double esc(const SystemCase& sys, const Schedule& sched_new,
                  const Schedule& sched_base) {
  if (sched_new.num_units() != sched_base.num_units() ||
      sched_new.horizon() != sched_base.horizon())
    throw std::invalid_argument("esc: schedules have mismatched shapes");
  double extra = 0.0;
  for (int i = 0; i < sched_new.num_units(); ++i)
    for (int t = 0; t < sched_new.horizon(); ++t)
      if (sched_new.on(i, t) && !sched_base.on(i, t))
        extra += sys.units[i].no_load_cost;
  double total = sched_new.recompute_cost(sys);
  if (total <= 0.0) return 0.0;
  return extra / total;
}

inline nlohmann::json evaluation_to_json(const EvaluationReport& r) {
  return {{"cai", r.cai},
          {"hour_violation_prob", r.hour_violation_prob},
          {"samples", r.samples},
          {"seed", r.seed}};
}

inline void write_violation_csv(const EvaluationReport& r, std::ostream& os) {
  os << "hour,violation_probability\n";
  os.precision(10);
  for (size_t t = 0; t < r.hour_violation_prob.size(); ++t)
    os << (t + 1) << ',' << r.hour_violation_prob[t] << '\n';
}

}  // namespace sscuc::eval
