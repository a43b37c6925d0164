#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "angsparse/bound.hpp"

namespace angsparse {

// F(1, v): the denominator with t absorbed into v.
double f1(const Weights& v, const AnalysisFrame& frame, const ChannelPrior& prior,
          PairExtremes extremes = PairExtremes::per_pair);

// n - numerator(1, v)^2 / F(1, v), the bound with t absorbed into v;
// +inf when F(1, v) <= 0.
double absorbed_statdim(const Weights& v, const AnalysisFrame& frame, const ChannelPrior& prior,
                        PairExtremes extremes = PairExtremes::per_pair);

// v_k = 1 / (beta_k + eps), normalized to mean 1.
Weights heuristic_weights(const RVector& beta, double eps = 0.05);

struct WeightOptions {
  int random_starts = 2;
  int max_iter = 1000;
  double v_floor = 1e-4;
  double step = 1.0;           // initial step on log v
  double fd_rel_step = 1e-5;   // central differences, relative to v_k
  double heuristic_eps = 0.05;
  double tol = 1e-10;          // stop when a step improves by less than tol * |objective|
  std::uint64_t seed = 0;
  int threads = 1;
  TSearch search;
};

struct StartSummary {
  std::string label;
  double initial = 0.0;  // absorbed objective at the scaled start
  double final = 0.0;
  int iterations = 0;
};

struct WeightResult {
  Weights weights;
  BoundReport report;  // statdim_upper of the returned weights
  std::vector<StartSummary> starts;
};

// Minimizes absorbed_statdim over v >= v_floor by projected gradient descent
// on log v (central finite differences, Armijo backtracking). Starts: uniform
// and 1/(beta + eps), each at its bound-optimal scale, and `random_starts`
// log-uniform draws. Throws DegenerateBoundError when no start has a valid
// bound.
WeightResult optimize_weights(const AnalysisFrame& frame, const ChannelPrior& prior,
                              const WeightOptions& opts = {});

}  // namespace angsparse
