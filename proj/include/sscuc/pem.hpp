// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Hong's two-point estimation scheme: each random input is concentrated
// into two (location, weight) pairs matched to its first three moments;
// 2m deterministic evaluations replace sampling, and output raw moments
// are reconstructed as weighted power sums.

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sscuc::pem {

class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& m) : std::invalid_argument(m) {}
};

struct RandomInput {
  int index = 0;  // caller-side identifier, preserved in concentrations
  double mean = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;  // third standard central moment
};

struct Concentration {
  int variable = 0;  // RandomInput::index
  int side = 0;      // 1 or 2
  double xi = 0.0;
  double location = 0.0;
  double weight = 0.0;
};

// Standard locations xi_1 > 0 > xi_2 for a variable with skewness lam3
// among m random inputs.
inline std::pair<double, double> standard_locations(double lam3, int m) {
  if (m < 1) throw DomainError("standard_locations: m must be >= 1");
  double h = lam3 / 2.0;
  double root = std::sqrt(static_cast<double>(m) + h * h);
  return {h + root, h - root};
}

inline std::pair<double, double> weights(double xi1, double xi2, int m) {
  if (xi1 == xi2)
    throw DomainError("weights: degenerate locations (zero-variance input?)");
  double w1 = -(1.0 / m) * xi2 / (xi1 - xi2);
  double w2 = (1.0 / m) * xi1 / (xi1 - xi2);
  return {w1, w2};
}

// Builds the 2m concentrations. Zero-variance inputs are excluded from m
// and stay pinned at their mean in every evaluation point.
inline std::vector<Concentration> build_concentrations(
    const std::vector<RandomInput>& inputs) {
  if (inputs.empty()) throw DomainError("build_concentrations: no inputs");
  std::vector<const RandomInput*> active;
  for (const auto& in : inputs)
    if (in.std_dev > 0.0) active.push_back(&in);
  const int m = static_cast<int>(active.size());
  std::vector<Concentration> out;
  out.reserve(2 * m);
  for (const auto* in : active) {
    auto [xi1, xi2] = standard_locations(in->skewness, m);
    auto [w1, w2] = weights(xi1, xi2, m);
    out.push_back({in->index, 1, xi1, in->mean + xi1 * in->std_dev, w1});
    out.push_back({in->index, 2, xi2, in->mean + xi2 * in->std_dev, w2});
  }
  return out;
}

struct MomentEstimate {
  std::vector<double> raw;  // raw[j-1] = estimated E[Z^j]
  double mean() const { return raw.empty() ? 0.0 : raw[0]; }
  double std_dev() const {
    if (raw.size() < 2) return 0.0;
    return std::sqrt(std::max(0.0, raw[1] - raw[0] * raw[0]));
  }
};

inline MomentEstimate estimate_moments(
    const std::vector<std::pair<double, double>>& evaluations, int j_max = 2) {
  if (j_max < 1 || j_max > 4)
    throw DomainError("estimate_moments: j_max must be in [1, 4]");
  double wsum = 0.0;
  for (const auto& [w, z] : evaluations) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw DomainError("estimate_moments: weights sum to " + std::to_string(wsum) +
                      ", expected 1");
  MomentEstimate est;
  est.raw.assign(j_max, 0.0);
  for (const auto& [w, z] : evaluations) {
    double p = 1.0;
    for (int j = 0; j < j_max; ++j) {
      p *= z;
      est.raw[j] += w * p;
    }
  }
  return est;
}

// Componentwise variant for vector-valued outputs.
inline std::vector<MomentEstimate> estimate_moments(
    const std::vector<std::pair<double, std::vector<double>>>& evaluations,
    int j_max = 2) {
  if (evaluations.empty()) throw DomainError("estimate_moments: no evaluations");
  size_t dim = evaluations.front().second.size();
  std::vector<MomentEstimate> out(dim);
  for (size_t c = 0; c < dim; ++c) {
    std::vector<std::pair<double, double>> scalar;
    scalar.reserve(evaluations.size());
    for (const auto& [w, z] : evaluations) scalar.push_back({w, z.at(c)});
    out[c] = estimate_moments(scalar, j_max);
  }
  return out;
}

}  // namespace sscuc::pem
