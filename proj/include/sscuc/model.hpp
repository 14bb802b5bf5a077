// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// System data model: thermal units, lines, uncertain loads and wind,
// validation, DC-network shift factors, and case-file JSON I/O.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace sscuc {

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CostSegment {
  double breakpoint = 0.0;     // MW, cumulative upper end of the segment
  double marginal_cost = 0.0;  // $/MWh
};

struct ThermalUnit {
  int id = 0;
  int bus = 0;
  double p_min = 0.0, p_max = 0.0;        // MW
  double ramp_up = 0.0, ramp_down = 0.0;  // MW/h
  int min_on = 1, min_off = 1;            // hours
  int initial_status = 1;                 // signed hours on(+) / off(-) at t=0
  double initial_output = 0.0;            // MW at t=0
  std::vector<CostSegment> cost_segments;
  double no_load_cost = 0.0;  // $/h
  double startup_cost = 0.0, shutdown_cost = 0.0;  // $
  double corrective_up = -1.0, corrective_dn = -1.0;  // MW; <0 means default

  // Corrective actions run in ten minutes, so the default capability is
  // 10/60 of the hourly ramp rate.
  double corrective_up_mw() const {
    return corrective_up >= 0.0 ? corrective_up : ramp_up * (10.0 / 60.0);
  }
  double corrective_dn_mw() const {
    return corrective_dn >= 0.0 ? corrective_dn : ramp_down * (10.0 / 60.0);
  }

  bool initially_on() const { return initial_status > 0; }

  // Energy cost of output p (above zero), excluding the no-load constant.
  double energy_cost(double p) const {
    double cost = 0.0, prev = 0.0;
    for (const auto& seg : cost_segments) {
      double take = std::clamp(p, prev, seg.breakpoint) - prev;
      if (take > 0) cost += take * seg.marginal_cost;
      prev = seg.breakpoint;
    }
    return cost;
  }
};

struct Line {
  int id = 0;
  int from_bus = 0, to_bus = 0;
  double reactance = 0.0;   // per-unit
  double flow_limit = 0.0;  // MW
};

enum class Distribution { Normal, TruncatedNormal };

// Shared shape of LoadPoint and WindFarm: a 24-hour mean profile scaled by
// one multiplicative random deviate.
struct UncertainSource {
  int bus = 0;
  std::vector<double> hourly_mean;  // MW, length = horizon
  double sigma_fraction = 0.0;
  Distribution distribution = Distribution::Normal;
  double skewness = 0.0;
};

struct LoadPoint : UncertainSource {
  LoadPoint() {
    sigma_fraction = 0.10;
    distribution = Distribution::TruncatedNormal;
  }
};

struct WindFarm : UncertainSource {
  WindFarm() {
    sigma_fraction = 0.20;
    distribution = Distribution::Normal;
  }
};

struct SystemCase {
  std::vector<int> buses;
  std::vector<Line> lines;
  std::vector<ThermalUnit> units;
  std::vector<LoadPoint> loads;
  std::vector<WindFarm> wind;
  std::vector<double> spinning_reserve_req;   // MW per hour
  std::vector<double> operating_reserve_req;  // MW per hour
  int slack_bus = -1;  // -1: lowest-index bus
  int horizon = 24;

  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_units() const { return static_cast<int>(units.size()); }
  int num_loads() const { return static_cast<int>(loads.size()); }
  int num_wind() const { return static_cast<int>(wind.size()); }

  int effective_slack() const {
    if (slack_bus >= 0) return slack_bus;
    return *std::min_element(buses.begin(), buses.end());
  }

  int bus_index(int bus_id) const {
    auto it = std::find(buses.begin(), buses.end(), bus_id);
    if (it == buses.end())
      throw ValidationError("unknown bus id " + std::to_string(bus_id));
    return static_cast<int>(it - buses.begin());
  }

  double total_load(int t) const {
    double v = 0.0;
    for (const auto& l : loads) v += l.hourly_mean[t];
    return v;
  }
  double total_wind(int t) const {
    double v = 0.0;
    for (const auto& w : wind) v += w.hourly_mean[t];
    return v;
  }

  void validate() const;
};

inline void SystemCase::validate() const {
  std::vector<std::string> errs;
  auto fail = [&](const std::string& m) { errs.push_back(m); };

  if (buses.empty()) fail("buses: empty");
  if (horizon < 1) fail("horizon: must be >= 1");
  {
    std::vector<int> sorted = buses;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail("buses: duplicate bus id");
  }
  auto known_bus = [&](int b) {
    return std::find(buses.begin(), buses.end(), b) != buses.end();
  };
  if (slack_bus >= 0 && !known_bus(slack_bus))
    fail("slack_bus: unresolved bus id " + std::to_string(slack_bus));

  for (size_t k = 0; k < lines.size(); ++k) {
    const auto& ln = lines[k];
    std::string at = "lines[" + std::to_string(k) + "]";
    if (!known_bus(ln.from_bus)) fail(at + ".from_bus: unresolved bus " + std::to_string(ln.from_bus));
    if (!known_bus(ln.to_bus)) fail(at + ".to_bus: unresolved bus " + std::to_string(ln.to_bus));
    if (ln.from_bus == ln.to_bus) fail(at + ": from_bus equals to_bus");
    if (!(ln.reactance > 0)) fail(at + ".reactance: must be > 0");
    if (!(ln.flow_limit > 0)) fail(at + ".flow_limit: must be > 0");
  }

  for (size_t k = 0; k < units.size(); ++k) {
    const auto& u = units[k];
    std::string at = "units[" + std::to_string(k) + "] (id " + std::to_string(u.id) + ")";
    if (!known_bus(u.bus)) fail(at + ".bus: unresolved bus " + std::to_string(u.bus));
    if (u.p_min < 0) fail(at + ".p_min: must be >= 0");
    if (u.p_min > u.p_max) fail(at + ": p_min > p_max");
    if (!(u.ramp_up > 0)) fail(at + ".ramp_up: must be > 0");
    if (!(u.ramp_down > 0)) fail(at + ".ramp_down: must be > 0");
    if (u.min_on < 1) fail(at + ".min_on: must be >= 1");
    if (u.min_off < 1) fail(at + ".min_off: must be >= 1");
    if (u.cost_segments.empty()) fail(at + ".cost_segments: empty");
    double prev_bp = 0.0, prev_mc = -std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < u.cost_segments.size(); ++s) {
      const auto& seg = u.cost_segments[s];
      std::string sat = at + ".cost_segments[" + std::to_string(s) + "]";
      if (seg.breakpoint <= prev_bp && s > 0) fail(sat + ".breakpoint: not increasing");
      if (seg.marginal_cost < prev_mc) fail(sat + ".marginal_cost: decreasing (non-convex)");
      prev_bp = seg.breakpoint;
      prev_mc = seg.marginal_cost;
    }
    if (!u.cost_segments.empty() && u.cost_segments.back().breakpoint < u.p_max - 1e-9)
      fail(at + ".cost_segments: last breakpoint below p_max");
    if (u.corrective_up_mw() > u.ramp_up + 1e-9) fail(at + ".corrective_up: exceeds ramp_up");
    if (u.corrective_dn_mw() > u.ramp_down + 1e-9) fail(at + ".corrective_dn: exceeds ramp_down");
    if (u.initial_status == 0) fail(at + ".initial_status: must be nonzero signed hours");
  }

  auto check_source = [&](const UncertainSource& s, const std::string& at) {
    if (!known_bus(s.bus)) fail(at + ".bus: unresolved bus " + std::to_string(s.bus));
    if (static_cast<int>(s.hourly_mean.size()) != horizon)
      fail(at + ".hourly_mean: expected " + std::to_string(horizon) + " entries, got " +
           std::to_string(s.hourly_mean.size()));
    for (double v : s.hourly_mean)
      if (v < 0) { fail(at + ".hourly_mean: negative entry"); break; }
    if (s.sigma_fraction < 0 || s.sigma_fraction >= 1)
      fail(at + ".sigma_fraction: must lie in [0, 1)");
  };
  for (size_t k = 0; k < loads.size(); ++k)
    check_source(loads[k], "loads[" + std::to_string(k) + "]");
  for (size_t k = 0; k < wind.size(); ++k)
    check_source(wind[k], "wind[" + std::to_string(k) + "]");

  auto check_req = [&](const std::vector<double>& r, const std::string& at) {
    if (static_cast<int>(r.size()) != horizon)
      fail(at + ": expected " + std::to_string(horizon) + " entries, got " +
           std::to_string(r.size()));
    for (double v : r)
      if (v < 0) { fail(at + ": negative entry"); break; }
  };
  check_req(spinning_reserve_req, "reserves.spinning");
  check_req(operating_reserve_req, "reserves.operating");

  // Connectivity (lines only).
  if (!buses.empty()) {
    std::map<int, std::vector<int>> adj;
    for (const auto& ln : lines) {
      adj[ln.from_bus].push_back(ln.to_bus);
      adj[ln.to_bus].push_back(ln.from_bus);
    }
    std::map<int, bool> seen;
    std::queue<int> q;
    q.push(buses.front());
    seen[buses.front()] = true;
    while (!q.empty()) {
      int b = q.front();
      q.pop();
      for (int nb : adj[b])
        if (!seen[nb]) { seen[nb] = true; q.push(nb); }
    }
    for (int b : buses)
      if (!seen[b]) { fail("network: bus " + std::to_string(b) + " is disconnected"); break; }
  }

  // Aggregate adequacy at forecast means.
  if (errs.empty() && !units.empty()) {
    double cap = 0.0;
    for (const auto& u : units) cap += u.p_max;
    for (int t = 0; t < horizon; ++t) {
      if (cap + 1e-9 < total_load(t) - total_wind(t)) {
        fail("adequacy: fleet capacity " + std::to_string(cap) +
             " MW below net mean load at hour " + std::to_string(t));
        break;
      }
    }
  }

  if (!errs.empty()) {
    std::string msg = "case validation failed:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
}

// --- DC network model -------------------------------------------------------

struct NetworkModel {
  int n_lines = 0, n_buses = 0;
  std::vector<double> sf;                  // lines x buses, row-major
  std::vector<std::vector<double>> k_p;    // unit -> bus incidence (one 1 per row)
  std::vector<std::vector<double>> k_d;    // load -> bus incidence
  std::vector<int> unit_bus, load_bus, wind_bus;  // bus indices

  double shift(int line, int bus) const { return sf[static_cast<size_t>(line) * n_buses + bus]; }

  // MW flow on each line (positive from->to) for a bus injection vector.
  std::vector<double> flows(const std::vector<double>& injection) const {
    std::vector<double> f(n_lines, 0.0);
    for (int l = 0; l < n_lines; ++l) {
      double v = 0.0;
      for (int b = 0; b < n_buses; ++b) v += shift(l, b) * injection[b];
      f[l] = v;
    }
    return f;
  }
};

namespace detail {

// Dense LU solve with partial pivoting; A is n x n row-major, b is n x k.
inline bool lu_solve(std::vector<double> a, std::vector<double>& b, int n, int k) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(a[static_cast<size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double v = std::fabs(a[static_cast<size_t>(r) * n + col]);
      if (v > best) { best = v; piv = r; }
    }
    if (best < 1e-12) return false;
    if (piv != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(col) * n + j], a[static_cast<size_t>(piv) * n + j]);
      for (int j = 0; j < k; ++j)
        std::swap(b[static_cast<size_t>(col) * k + j], b[static_cast<size_t>(piv) * k + j]);
    }
    double d = a[static_cast<size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      double f = a[static_cast<size_t>(r) * n + col] / d;
      if (f == 0.0) continue;
      a[static_cast<size_t>(r) * n + col] = 0.0;
      for (int j = col + 1; j < n; ++j)
        a[static_cast<size_t>(r) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
      for (int j = 0; j < k; ++j)
        b[static_cast<size_t>(r) * k + j] -= f * b[static_cast<size_t>(col) * k + j];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    double d = a[static_cast<size_t>(col) * n + col];
    for (int j = 0; j < k; ++j) {
      double v = b[static_cast<size_t>(col) * k + j];
      for (int c = col + 1; c < n; ++c)
        v -= a[static_cast<size_t>(col) * n + c] * b[static_cast<size_t>(c) * k + j];
      b[static_cast<size_t>(col) * k + j] = v / d;
    }
  }
  return true;
}

}  // namespace detail

inline NetworkModel compute_shift_factors(const SystemCase& sys) {
  const int nb = sys.num_buses();
  const int nl = static_cast<int>(sys.lines.size());
  const int slack = sys.bus_index(sys.effective_slack());

  NetworkModel net;
  net.n_lines = nl;
  net.n_buses = nb;
  net.sf.assign(static_cast<size_t>(nl) * nb, 0.0);

  // Reduced nodal susceptance matrix (slack row/column removed).
  std::vector<int> red(nb, -1);  // bus index -> reduced index
  int nr = 0;
  for (int b = 0; b < nb; ++b)
    if (b != slack) red[b] = nr++;

  std::vector<double> bmat(static_cast<size_t>(nr) * nr, 0.0);
  for (const auto& ln : sys.lines) {
    int i = sys.bus_index(ln.from_bus), j = sys.bus_index(ln.to_bus);
    double y = 1.0 / ln.reactance;
    if (red[i] >= 0) bmat[static_cast<size_t>(red[i]) * nr + red[i]] += y;
    if (red[j] >= 0) bmat[static_cast<size_t>(red[j]) * nr + red[j]] += y;
    if (red[i] >= 0 && red[j] >= 0) {
      bmat[static_cast<size_t>(red[i]) * nr + red[j]] -= y;
      bmat[static_cast<size_t>(red[j]) * nr + red[i]] -= y;
    }
  }

  if (nr > 0) {
    // Solve B' Theta = I: Theta columns are angles per unit injection.
    std::vector<double> theta(static_cast<size_t>(nr) * nr, 0.0);
    for (int i = 0; i < nr; ++i) theta[static_cast<size_t>(i) * nr + i] = 1.0;
    if (!detail::lu_solve(bmat, theta, nr, nr)) {
      // Name the stranded component for the diagnostic.
      std::string who;
      for (int b = 0; b < nb; ++b)
        if (red[b] >= 0) { who = std::to_string(sys.buses[b]); break; }
      throw ValidationError(
          "compute_shift_factors: singular reduced susceptance matrix "
          "(network disconnected near bus " + who + ")");
    }
    for (int l = 0; l < nl; ++l) {
      const auto& ln = sys.lines[l];
      int i = sys.bus_index(ln.from_bus), j = sys.bus_index(ln.to_bus);
      for (int b = 0; b < nb; ++b) {
        if (b == slack) continue;
        double ti = red[i] >= 0 ? theta[static_cast<size_t>(red[i]) * nr + red[b]] : 0.0;
        double tj = red[j] >= 0 ? theta[static_cast<size_t>(red[j]) * nr + red[b]] : 0.0;
        net.sf[static_cast<size_t>(l) * nb + b] = (ti - tj) / ln.reactance;
      }
    }
  }

  net.unit_bus.reserve(sys.units.size());
  for (const auto& u : sys.units) {
    net.unit_bus.push_back(sys.bus_index(u.bus));
    std::vector<double> row(nb, 0.0);
    row[net.unit_bus.back()] = 1.0;
    net.k_p.push_back(std::move(row));
  }
  net.load_bus.reserve(sys.loads.size());
  for (const auto& l : sys.loads) {
    net.load_bus.push_back(sys.bus_index(l.bus));
    std::vector<double> row(nb, 0.0);
    row[net.load_bus.back()] = 1.0;
    net.k_d.push_back(std::move(row));
  }
  for (const auto& w : sys.wind) net.wind_bus.push_back(sys.bus_index(w.bus));
  return net;
}

// --- Case file I/O -----------------------------------------------------------

inline void to_json(nlohmann::json& j, const CostSegment& s) {
  j = {{"breakpoint", s.breakpoint}, {"marginal_cost", s.marginal_cost}};
}
inline void from_json(const nlohmann::json& j, CostSegment& s) {
  j.at("breakpoint").get_to(s.breakpoint);
  j.at("marginal_cost").get_to(s.marginal_cost);
}

inline void to_json(nlohmann::json& j, const Line& l) {
  j = {{"id", l.id}, {"from_bus", l.from_bus}, {"to_bus", l.to_bus},
       {"reactance", l.reactance}, {"flow_limit", l.flow_limit}};
}
inline void from_json(const nlohmann::json& j, Line& l) {
  j.at("id").get_to(l.id);
  j.at("from_bus").get_to(l.from_bus);
  j.at("to_bus").get_to(l.to_bus);
  j.at("reactance").get_to(l.reactance);
  j.at("flow_limit").get_to(l.flow_limit);
}

inline void to_json(nlohmann::json& j, const ThermalUnit& u) {
  j = {{"id", u.id}, {"bus", u.bus}, {"p_min", u.p_min}, {"p_max", u.p_max},
       {"ramp_up", u.ramp_up}, {"ramp_down", u.ramp_down},
       {"min_on", u.min_on}, {"min_off", u.min_off},
       {"initial_status", u.initial_status}, {"initial_output", u.initial_output},
       {"cost_segments", u.cost_segments}, {"no_load_cost", u.no_load_cost},
       {"startup_cost", u.startup_cost}, {"shutdown_cost", u.shutdown_cost}};
  if (u.corrective_up >= 0) j["corrective_up"] = u.corrective_up;
  if (u.corrective_dn >= 0) j["corrective_dn"] = u.corrective_dn;
}
inline void from_json(const nlohmann::json& j, ThermalUnit& u) {
  j.at("id").get_to(u.id);
  j.at("bus").get_to(u.bus);
  j.at("p_min").get_to(u.p_min);
  j.at("p_max").get_to(u.p_max);
  j.at("ramp_up").get_to(u.ramp_up);
  j.at("ramp_down").get_to(u.ramp_down);
  j.at("min_on").get_to(u.min_on);
  j.at("min_off").get_to(u.min_off);
  j.at("initial_status").get_to(u.initial_status);
  j.at("initial_output").get_to(u.initial_output);
  j.at("cost_segments").get_to(u.cost_segments);
  j.at("no_load_cost").get_to(u.no_load_cost);
  j.at("startup_cost").get_to(u.startup_cost);
  j.at("shutdown_cost").get_to(u.shutdown_cost);
  u.corrective_up = j.value("corrective_up", -1.0);
  u.corrective_dn = j.value("corrective_dn", -1.0);
}

namespace detail {

inline std::string dist_name(Distribution d) {
  return d == Distribution::Normal ? "normal" : "truncated-normal";
}
inline Distribution dist_from(const std::string& s) {
  if (s == "normal") return Distribution::Normal;
  if (s == "truncated-normal") return Distribution::TruncatedNormal;
  throw ValidationError("distribution: unknown value '" + s + "'");
}

template <class S>
void source_to_json(nlohmann::json& j, const S& s) {
  j = {{"bus", s.bus}, {"hourly_mean", s.hourly_mean},
       {"sigma_fraction", s.sigma_fraction},
       {"distribution", dist_name(s.distribution)}, {"skewness", s.skewness}};
}
template <class S>
void source_from_json(const nlohmann::json& j, S& s) {
  j.at("bus").get_to(s.bus);
  j.at("hourly_mean").get_to(s.hourly_mean);
  if (j.contains("sigma_fraction")) j.at("sigma_fraction").get_to(s.sigma_fraction);
  if (j.contains("distribution")) s.distribution = dist_from(j.at("distribution").get<std::string>());
  s.skewness = j.value("skewness", 0.0);
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const LoadPoint& l) { detail::source_to_json(j, l); }
inline void from_json(const nlohmann::json& j, LoadPoint& l) { detail::source_from_json(j, l); }
inline void to_json(nlohmann::json& j, const WindFarm& w) { detail::source_to_json(j, w); }
inline void from_json(const nlohmann::json& j, WindFarm& w) { detail::source_from_json(j, w); }

inline void to_json(nlohmann::json& j, const SystemCase& c) {
  j = {{"buses", c.buses}, {"lines", c.lines}, {"units", c.units},
       {"loads", c.loads}, {"wind", c.wind},
       {"reserves", {{"spinning", c.spinning_reserve_req},
                     {"operating", c.operating_reserve_req}}},
       {"slack_bus", c.slack_bus}, {"horizon", c.horizon}};
}
inline void from_json(const nlohmann::json& j, SystemCase& c) {
  j.at("buses").get_to(c.buses);
  j.at("lines").get_to(c.lines);
  j.at("units").get_to(c.units);
  j.at("loads").get_to(c.loads);
  j.at("wind").get_to(c.wind);
  j.at("reserves").at("spinning").get_to(c.spinning_reserve_req);
  j.at("reserves").at("operating").get_to(c.operating_reserve_req);
  c.slack_bus = j.value("slack_bus", -1);
  c.horizon = j.value("horizon", 24);
}

inline SystemCase load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_case: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("load_case: '" + path + "' is not valid JSON: " + e.what());
  }
  SystemCase c;
  try {
    c = j.get<SystemCase>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("load_case: '" + path + "' schema violation: " + std::string(e.what()));
  }
  c.validate();
  return c;
}

inline void save_case(const SystemCase& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("save_case: cannot open '" + path + "' for writing");
  nlohmann::json j = c;
  out << j.dump(2) << "\n";
}

}  // namespace sscuc
