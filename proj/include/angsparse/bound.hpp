#pragma once

#include "angsparse/frame.hpp"
#include "angsparse/priors.hpp"
#include "angsparse/solver.hpp"

namespace angsparse {

// q(t) = sqrt(2/pi) exp(-t^2/2)/t + erf(t/sqrt(2)) - 1, t > 0.
double q_func(double t);

// How the min/max weights inside the cross term of F are taken.
//   per_pair: min/max of (t v_i, t v_j) for each pair, as in the two-vector
//             Gaussian lemma the term comes from.
//   global:   min/max over all bins.
enum class PairExtremes { per_pair, global };

const char* to_string(PairExtremes extremes);
PairExtremes pair_extremes_from_string(const std::string& name);

// sum_k (1 - beta_k) |omega_k| erf(t v_k / sqrt(2))
double bound_numerator(double t, const Weights& v, const AnalysisFrame& frame,
                       const ChannelPrior& prior);

// F(t, v) =   sum_ij (t v_i)(t v_j) Re(omega_i^H omega_j) sigma_ij
//           + sum_ij coh_ij [erf(a_min/sqrt 2) - q(a_max) (t v_i)(t v_j)]
//                    (1 - beta_i - beta_j + beta_ij)
// with coh_ij = |omega_i^H omega_j|^2 / (|omega_i||omega_j|).
double bound_denominator(double t, const Weights& v, const AnalysisFrame& frame,
                         const ChannelPrior& prior,
                         PairExtremes extremes = PairExtremes::per_pair);

// Precomputes everything that does not depend on t, after which numerator and
// F cost O(p) per t. The per-pair cross term is split by which bin of the pair
// holds the smaller weight.
class BoundEvaluator {
 public:
  BoundEvaluator(const Weights& v, const AnalysisFrame& frame, const ChannelPrior& prior,
                 PairExtremes extremes = PairExtremes::per_pair);

  double numerator(double t) const;
  double denominator(double t) const;
  // n - numerator^2 / F, or +inf when F <= 0.
  double infimand(double t) const;
  int n() const { return n_; }

 private:
  int n_;
  PairExtremes extremes_;
  RVector v_;
  RVector numerator_coeff_;  // (1 - beta_k) |omega_k|
  double sign_energy_ = 0.0;  // v^T (Re G o sigma) v
  // per_pair: as_min_[k] = sum of coh*P over pairs whose smaller weight is v_k,
  // as_max_[k] = sum of coh*P*v_i*v_j over pairs whose larger weight is v_k.
  RVector as_min_;
  RVector as_max_;
  // global
  double cross_mass_ = 0.0;
  double cross_energy_ = 0.0;
  double v_min_ = 0.0;
  double v_max_ = 0.0;
};

struct TSearch {
  double lo = 1e-3;
  double hi = 1e3;
  int resolution = 601;  // log-spaced grid points
  double rel_tol = 1e-6;  // golden-section tolerance on t
  PairExtremes extremes = PairExtremes::per_pair;
};

struct BoundReport {
  double statdim_upper = 0.0;
  double t_star = 0.0;
  double lambda_star = 0.0;
  bool valid = false;  // false when the bound degenerates to n
  int n = 0;
};

// inf over t in [lo, hi] of n - numerator(t)^2 / F(t), skipping F <= 0, via a
// log grid refined by golden section around the best grid point. t = 1 is
// always a candidate. Clamped to [0, n]; reported as n with valid = false when
// no t has F > 0 or the infimum is not below n.
BoundReport statdim_upper(const Weights& v, const AnalysisFrame& frame,
                          const ChannelPrior& prior, const TSearch& search = {});

struct ErrorBound {
  double value = 0.0;      // +inf when the denominator vanishes
  bool finite = false;
  double probability = 0.0;  // 1 - exp(-a^2/2)
};

// 2 eta / max(sqrt(m-1) - sqrt(statdim) - a, 0), without the Jensen-gap
// constant (not quantified by the bound).
ErrorBound error_upper(double statdim, int m, double eta, double a);
ErrorBound error_upper(const BoundReport& report, int m, double eta, double a);

// numerator(t) / F(t). Throws DegenerateBoundError when F <= 0.
double lambda_star(double t, const Weights& v, const AnalysisFrame& frame,
                   const ChannelPrior& prior,
                   PairExtremes extremes = PairExtremes::per_pair);

// The bound before optimizing over lambda: n - 2 lambda numerator(t) + lambda^2 F(t).
double lambda_objective(double lambda, double t, const Weights& v, const AnalysisFrame& frame,
                        const ChannelPrior& prior,
                        PairExtremes extremes = PairExtremes::per_pair);

}  // namespace angsparse
