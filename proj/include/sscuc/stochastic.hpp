// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte-Carlo sampling of wind/load deviates and fast-forward
// scenario reduction with probability redistribution.
//
// Each wind farm and each load point contributes ONE random variable: a
// multiplicative deviate with mean 1 that scales its whole hourly profile.
// Loads follow truncated normals (bounds mean +/- 3 sigma, floored at 0,
// pre-truncation sigma calibrated so the post-truncation sigma matches the
// declared fraction); wind follows a normal clipped at zero.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sscuc/model.hpp"
#include "sscuc/pem.hpp"

namespace sscuc::stochastic {

inline double normal_pdf(double z) {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Normal distribution truncated to [a, b], parameterized by the
// pre-truncation mean/sigma. Post-truncation moments are analytic.
struct TruncatedNormal {
  double mu0 = 0.0, sigma0 = 1.0;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();

  double alpha() const { return (a - mu0) / sigma0; }
  double beta() const { return (b - mu0) / sigma0; }
  double z() const { return normal_cdf(beta()) - normal_cdf(alpha()); }

  // E[Z^k] for the standardized truncated variable, via the moment recursion
  // E[Z^k] = (k-1) E[Z^(k-2)] + (al^(k-1) phi(al) - be^(k-1) phi(be)) / z.
  double std_moment(int k) const {
    double al = alpha(), be = beta(), zz = z();
    auto tail = [&](double t, int pow) {
      if (!std::isfinite(t)) return 0.0;
      double v = normal_pdf(t);
      for (int i = 0; i < pow; ++i) v *= t;
      return v;
    };
    std::vector<double> m(k + 1);
    m[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
      double prev = j >= 2 ? m[j - 2] : 0.0;
      m[j] = (j - 1) * prev + (tail(al, j - 1) - tail(be, j - 1)) / zz;
    }
    return m[k];
  }

  double mean() const { return mu0 + sigma0 * std_moment(1); }
  double variance() const {
    double m1 = std_moment(1), m2 = std_moment(2);
    return sigma0 * sigma0 * (m2 - m1 * m1);
  }
  double std_dev() const { return std::sqrt(std::max(0.0, variance())); }
  double skewness() const {
    double m1 = std_moment(1), m2 = std_moment(2), m3 = std_moment(3);
    double var = m2 - m1 * m1;
    double c3 = m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1;
    return c3 / std::pow(var, 1.5);
  }

  // Finds pre-truncation (mu0, sigma0) so that the post-truncation mean and
  // sigma hit the targets within the fixed bounds [a, b].
  static TruncatedNormal calibrate(double target_mean, double target_sigma,
                                   double lo, double hi) {
    TruncatedNormal tn{target_mean, target_sigma, lo, hi};
    for (int it = 0; it < 200; ++it) {
      double em = tn.mean(), es = tn.std_dev();
      double dm = target_mean - em;
      double rs = target_sigma / std::max(es, 1e-300);
      tn.mu0 += dm;
      tn.sigma0 *= rs;
      if (std::fabs(dm) < 1e-12 * (1 + std::fabs(target_mean)) &&
          std::fabs(rs - 1.0) < 1e-12)
        break;
    }
    return tn;
  }

  template <class Rng>
  double sample(Rng& rng) const {
    std::normal_distribution<double> dist(mu0, sigma0);
    for (int tries = 0; tries < 10000; ++tries) {
      double v = dist(rng);
      if (v >= a && v <= b) return v;
    }
    return std::clamp(mean(), a, b);  // pathological truncation
  }
};

// One random variable of a case: the deviate of a load point or wind farm.
struct RandomVariable {
  enum class Kind { Load, Wind };
  Kind kind = Kind::Load;
  int source = 0;  // index into case loads / wind
  double sigma = 0.0;
  double skewness = 0.0;
  bool truncated = false;
  TruncatedNormal tn;  // valid when truncated

  template <class Rng>
  double sample(Rng& rng) const {
    if (sigma <= 0.0) return 1.0;
    if (truncated) return tn.sample(rng);
    std::normal_distribution<double> dist(1.0, sigma);
    return std::max(0.0, dist(rng));  // wind cannot go negative
  }
};

inline std::vector<RandomVariable> random_variables(const SystemCase& sys) {
  std::vector<RandomVariable> vars;
  auto add = [&](const UncertainSource& s, RandomVariable::Kind kind, int idx) {
    RandomVariable v;
    v.kind = kind;
    v.source = idx;
    v.sigma = s.sigma_fraction;
    v.skewness = s.skewness;
    if (s.distribution == Distribution::TruncatedNormal && v.sigma > 0) {
      double lo = std::max(0.0, 1.0 - 3.0 * v.sigma);
      double hi = 1.0 + 3.0 * v.sigma;
      v.tn = TruncatedNormal::calibrate(1.0, v.sigma, lo, hi);
      v.truncated = true;
      v.skewness = v.tn.skewness();
    }
    vars.push_back(v);
  };
  for (int i = 0; i < sys.num_wind(); ++i) add(sys.wind[i], RandomVariable::Kind::Wind, i);
  for (int i = 0; i < sys.num_loads(); ++i) add(sys.loads[i], RandomVariable::Kind::Load, i);
  return vars;
}

// PEM inputs for the case's random variables; index = position in
// random_variables(sys). Zero-sigma sources are passed through and dropped
// inside build_concentrations.
inline std::vector<pem::RandomInput> pem_inputs(const SystemCase& sys) {
  std::vector<pem::RandomInput> in;
  auto vars = random_variables(sys);
  for (size_t i = 0; i < vars.size(); ++i)
    in.push_back({static_cast<int>(i), 1.0, vars[i].sigma, vars[i].skewness});
  return in;
}

enum class Provenance { Raw, Reduced };

struct ScenarioSet {
  int n_vars = 0;
  std::vector<double> deviates;  // scenario-major, n x n_vars
  std::vector<double> prob;
  std::uint64_t seed = 0;
  Provenance provenance = Provenance::Raw;

  int size() const { return static_cast<int>(prob.size()); }
  const double* scenario(int s) const { return &deviates[static_cast<size_t>(s) * n_vars]; }
  double deviate(int s, int v) const { return deviates[static_cast<size_t>(s) * n_vars + v]; }
};

inline ScenarioSet sample(const SystemCase& sys, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  auto vars = random_variables(sys);
  ScenarioSet set;
  set.n_vars = static_cast<int>(vars.size());
  set.seed = seed;
  set.deviates.resize(static_cast<size_t>(n) * set.n_vars);
  set.prob.assign(n, 1.0 / n);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < n; ++s)
    for (int v = 0; v < set.n_vars; ++v)
      set.deviates[static_cast<size_t>(s) * set.n_vars + v] = vars[v].sample(rng);
  return set;
}

// Kantorovich-style transport objective of a selection: probability-weighted
// distance of every scenario to its nearest selected one.
inline double reduction_objective(const ScenarioSet& set, const std::vector<int>& kept) {
  double obj = 0.0;
  for (int s = 0; s < set.size(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (int k : kept) {
      double d2 = 0.0;
      for (int v = 0; v < set.n_vars; ++v) {
        double dd = set.deviate(s, v) - set.deviate(k, v);
        d2 += dd * dd;
      }
      best = std::min(best, std::sqrt(d2));
    }
    obj += set.prob[s] * best;
  }
  return obj;
}

// Fast-forward selection order under the L2 scenario distance: greedily pick
// the scenario minimizing the probability-weighted distance of unselected
// scenarios to the selected set. The greedy sequence is a prefix chain, so
// one call serves every reduction size up to max_target.
//
// The marginal gain of a candidate is monotone non-increasing as the
// selected set grows, so a lazy-greedy priority queue reproduces the exact
// greedy choice while recomputing only a few candidates per round.
inline std::vector<int> fast_forward_order(const ScenarioSet& set, int max_target) {
  const int n = set.size();
  const int nv = set.n_vars;
  if (max_target < 1) throw std::invalid_argument("reduce: target_count must be >= 1");
  if (max_target > n) throw std::invalid_argument("reduce: target_count exceeds set size");

  auto dist = [&](int i, int j) {
    double d2 = 0.0;
    const double* a = set.scenario(i);
    const double* b = set.scenario(j);
    for (int v = 0; v < nv; ++v) {
      double dd = a[v] - b[v];
      d2 += dd * dd;
    }
    return std::sqrt(d2);
  };

  std::vector<int> kept;
  std::vector<char> selected(n, 0);
  std::vector<double> mind(n, std::numeric_limits<double>::infinity());

  // Round 1: exact scan for the scenario closest (probability-weighted)
  // to everything else.
  {
    int best = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      double obj = 0.0;
      for (int s = 0; s < n; ++s)
        if (s != c) obj += set.prob[s] * dist(s, c);
      if (obj < best_obj - 1e-15 || best < 0) {
        best_obj = obj;
        best = c;
      }
    }
    selected[best] = 1;
    kept.push_back(best);
    for (int s = 0; s < n; ++s)
      if (!selected[s]) mind[s] = dist(s, kept[0]);
  }

  // Gain of candidate c = sum_s p_s * max(0, mind_s - d(s, c)).
  auto gain = [&](int c) {
    double g = set.prob[c] * mind[c];  // c itself drops to distance 0
    for (int s = 0; s < n; ++s) {
      if (selected[s] || s == c) continue;
      double lim2 = mind[s] * mind[s];
      double d2 = 0.0;
      const double* a = set.scenario(s);
      const double* b = set.scenario(c);
      for (int v = 0; v < nv; ++v) {
        double dd = a[v] - b[v];
        d2 += dd * dd;
      }
      if (d2 < lim2) g += set.prob[s] * (mind[s] - std::sqrt(d2));
    }
    return g;
  };

  struct Entry {
    double gain;
    int round;  // round the gain was computed in
    int idx;
  };
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;  // max-heap on gain
    return a.idx > b.idx;                          // ties: lowest index first
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (int c = 0; c < n; ++c)
    if (!selected[c]) heap.push({gain(c), 1, c});

  for (int round = 2; round <= max_target; ++round) {
    int pick = -1;
    while (!heap.empty()) {
      Entry top = heap.top();
      heap.pop();
      if (selected[top.idx]) continue;
      if (top.round == round) {
        pick = top.idx;
        break;
      }
      heap.push({gain(top.idx), round, top.idx});
    }
    if (pick < 0) break;  // all remaining candidates coincide with kept ones
    selected[pick] = 1;
    kept.push_back(pick);
    for (int s = 0; s < n; ++s) {
      if (selected[s]) continue;
      double d = dist(s, pick);
      if (d < mind[s]) mind[s] = d;
    }
  }
  // Zero-gain padding when duplicates exhausted distinct picks early.
  for (int c = 0; c < n && static_cast<int>(kept.size()) < max_target; ++c)
    if (!selected[c]) {
      selected[c] = 1;
      kept.push_back(c);
    }
  return kept;
}

// Materializes the reduced set for a prefix of the fast-forward order:
// each deleted scenario's probability goes to its nearest kept scenario.
inline ScenarioSet materialize_reduction(const ScenarioSet& set,
                                         const std::vector<int>& order, int target) {
  const int n = set.size();
  const int nv = set.n_vars;
  std::vector<int> kept(order.begin(), order.begin() + target);
  std::vector<char> is_kept(n, 0);
  for (int k : kept) is_kept[k] = 1;

  std::vector<double> newprob(n, 0.0);
  for (int k : kept) newprob[k] = set.prob[k];
  for (int s = 0; s < n; ++s) {
    if (is_kept[s]) continue;
    double best = std::numeric_limits<double>::infinity();
    int who = kept[0];
    for (int k : kept) {
      double d2 = 0.0;
      const double* a = set.scenario(s);
      const double* b = set.scenario(k);
      for (int v = 0; v < nv; ++v) {
        double dd = a[v] - b[v];
        d2 += dd * dd;
      }
      if (d2 < best) {
        best = d2;
        who = k;
      }
    }
    newprob[who] += set.prob[s];
  }

  ScenarioSet out;
  out.n_vars = nv;
  out.seed = set.seed;
  out.provenance = Provenance::Reduced;
  out.deviates.reserve(static_cast<size_t>(target) * nv);
  double psum = 0.0, comp = 0.0;
  for (int k : kept) {
    const double* sc = set.scenario(k);
    out.deviates.insert(out.deviates.end(), sc, sc + nv);
    out.prob.push_back(newprob[k]);
    double y = newprob[k] - comp;
    double t = psum + y;
    comp = (t - psum) - y;
    psum = t;
  }
  out.prob.back() += 1.0 - psum;  // pin the total exactly
  return out;
}

inline ScenarioSet reduce(const ScenarioSet& set, int target) {
  if (target == set.size()) {
    ScenarioSet out = set;
    out.provenance = Provenance::Reduced;
    return out;
  }
  auto order = fast_forward_order(set, target);
  return materialize_reduction(set, order, target);
}

// CSV export/import: one row per scenario, probability first then deviates.
inline void write_csv(const ScenarioSet& set, std::ostream& os) {
  os.precision(17);
  for (int s = 0; s < set.size(); ++s) {
    os << set.prob[s];
    for (int v = 0; v < set.n_vars; ++v) os << "," << set.deviate(s, v);
    os << "\n";
  }
}

inline ScenarioSet read_csv(std::istream& is) {
  ScenarioSet set;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.empty()) continue;
    if (set.n_vars == 0) set.n_vars = static_cast<int>(vals.size()) - 1;
    if (static_cast<int>(vals.size()) != set.n_vars + 1)
      throw std::invalid_argument("scenario csv: ragged row");
    set.prob.push_back(vals[0]);
    set.deviates.insert(set.deviates.end(), vals.begin() + 1, vals.end());
  }
  return set;
}

}  // namespace sscuc::stochastic
