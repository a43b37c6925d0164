#pragma once

#include <cstdint>
#include <vector>

#include "angsparse/frame.hpp"
#include "angsparse/solver.hpp"
#include "angsparse/synth.hpp"

namespace angsparse {

struct ConeSolveOptions {
  int max_iter = 5000;
  double tol = 1e-8;  // on the norm of the projected-gradient mapping
};

struct ConeDistance {
  double dist2 = 0.0;
  double t = 0.0;
  CVector u;
  int iterations = 0;
  bool converged = false;
};

// Projection onto {(t, u): |u_k| <= t} (t >= 0 implied).
void project_box_cone(double& t, CVector& u);

// min_{t >= 0, |u_k| <= t} ||g - t b - M u||^2 by FISTA with function-value
// restart. With u = t z this is the squared distance from g to the cone
// generated by {b + M z : ||z||_inf <= 1}.
ConeDistance cone_distance(const CVector& g, const CVector& b, const CMatrix& M,
                           const ConeSolveOptions& opts = {});

// The cone generated by the weighted analysis subdifferential at h:
// b = Omega^H (v o sgn(Omega h)),  M = Omega_cos^H diag(v_cos).
class DescentConeProblem {
 public:
  DescentConeProblem(const AnalysisFrame& frame, const Weights& v,
                     const std::vector<int>& cosupport, const CVector& h);
  // Cosupport read off |Omega h|_k <= zero_tol * max_k |Omega h|_k.
  DescentConeProblem(const AnalysisFrame& frame, const Weights& v, const CVector& h,
                     double zero_tol = 1e-9);

  const CVector& anchor() const { return b_; }
  const CMatrix& atoms() const { return M_; }
  Field field() const { return field_; }
  // n for real frames, 2n for complex ones.
  int ambient_dim() const;
  ConeDistance distance(const CVector& g, const ConeSolveOptions& opts = {}) const;

 private:
  void init(const AnalysisFrame& frame, const Weights& v, const std::vector<int>& cosupport,
            const CVector& h);
  Field field_ = Field::complex;
  CVector b_;
  CMatrix M_;
};

// Standard normal g of the problem's field: N(0, 1) entries for real frames,
// real and imaginary parts each N(0, 1) for complex frames.
CVector draw_statdim_gaussian(Field field, int n, Rng& rng);

struct StatDimOptions {
  ConeSolveOptions inner;
  int threads = 1;
  bool keep_samples = false;
};

struct StatDimEstimate {
  double mean = 0.0;
  double stderr = 0.0;  // sample std / sqrt(n_ok)
  int n_mc = 0;         // draws requested
  int n_failed = 0;     // inner solves that hit max_iter, excluded
  int ambient_dim = 0;
  std::vector<double> samples;  // per-draw dist^2 (NaN for failed draws) if kept
};

// Monte Carlo estimate of E dist^2(g, cone) for one fixed h. Draw i uses the
// seed derive_seed(seed, {i}).
StatDimEstimate empirical_statdim(const AnalysisFrame& frame, const Weights& v,
                                  const ChannelRealization& channel, int n_mc,
                                  std::uint64_t seed, const StatDimOptions& opts = {});
StatDimEstimate empirical_statdim(const AnalysisFrame& frame, const Weights& v, const CVector& h,
                                  int n_mc, std::uint64_t seed, const StatDimOptions& opts = {});

// One g per channel: estimates the statistical dimension averaged over a
// channel ensemble.
StatDimEstimate ensemble_statdim(const AnalysisFrame& frame, const Weights& v,
                                 const std::vector<ChannelRealization>& channels,
                                 std::uint64_t seed, const StatDimOptions& opts = {});

}  // namespace angsparse
