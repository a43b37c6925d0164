#pragma once

#include "angsparse/frame.hpp"
#include "angsparse/types.hpp"

namespace angsparse {

// Strictly positive, finite per-bin weights.
class Weights {
 public:
  explicit Weights(RVector values);

  static Weights uniform(int p, double value = 1.0);

  const RVector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](Eigen::Index k) const { return values_[k]; }
  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }

  Weights scaled(double factor) const { return Weights(values_ * factor); }

 private:
  RVector values_;
};

// sgn(x) max(|x| - threshold, 0), the prox of threshold*|.| on C.
Complex soft_threshold(Complex x, double threshold);

// sum_k v_k |(Omega z)_k|
double objective(const AnalysisFrame& frame, const Weights& v, const CVector& z);

struct SolverOptions {
  int max_iter = 20000;
  // tol_feas is absolute on ||y - Az|| - eta. tol_opt bounds the certified
  // duality gap relative to max(1, objective), with weights rescaled to
  // max_k v_k = 1.
  double tol_feas = 1e-8;
  double tol_opt = 1e-8;
  double rho = 1.0;
  bool adapt_rho = true;
  int adapt_until = 5000;  // rho is frozen from this iteration on (0: never)
  double rho_factor = 2.0;
  double rho_ratio = 5.0;
  int check_every = 10;
  double relaxation = 1.8;  // over-relaxation factor in (0, 2)
  // A, y and eta are rescaled internally so that ||A||_2 / ||Omega||_2 equals
  // this ratio. 0 picks 30 for eta = 0 (an equality constraint, best enforced
  // hard) and 3 otherwise; a negative value disables the rescaling.
  double measurement_balance = 0.0;
};

struct SolverResult {
  CVector estimate;
  double objective = 0.0;   // ||Omega z||_{1,v}
  double residual = 0.0;    // ||y - A z||_2
  double dual_bound = 0.0;  // certified lower bound on the optimal value
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double rho = 0.0;
};

// Solves  min_z ||Omega z||_{1,v}  s.t.  ||y - A z||_2 <= eta
// by ADMM on (z, u = Omega z, s = A z). The z-step solves
// (Omega^H Omega + A^H A) z = rhs with a Cholesky factor computed once; in
// orthogonal mode Omega^H Omega = I. The u-step is complex soft-thresholding,
// the s-step projects onto the eta-ball around y. The measurement block is
// rescaled first (see measurement_balance). Iterations stop once
// ||y - A z|| <= eta + tol_feas and the duality gap (built from the scaled
// multipliers, made dual-feasible by projection and rescaling) is <= tol_opt.
//
// Throws WeightError for non-positive weights, DimensionError on shape
// mismatch and FeasibilityError when min_z ||y - A z|| > eta + tol_feas.
// Running out of iterations is reported through `converged = false`.
SolverResult solve(const CMatrix& A, const CVector& y, const AnalysisFrame& frame,
                   const Weights& v, double eta, const SolverOptions& opts = {});

}  // namespace angsparse
