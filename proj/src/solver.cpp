#include "angsparse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "angsparse/error.hpp"

namespace angsparse {

Weights::Weights(RVector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw WeightError("weights: empty vector");
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]) || !(values_[k] > 0.0)) {
      throw WeightError("weights: v[" + std::to_string(k) + "] = " +
                        std::to_string(values_[k]) + " is not strictly positive and finite");
    }
  }
}

Weights Weights::uniform(int p, double value) { return Weights(RVector::Constant(p, value)); }

Complex soft_threshold(Complex x, double threshold) {
  const double mag = std::abs(x);
  if (mag <= threshold) return {0.0, 0.0};
  return x * ((mag - threshold) / mag);
}

double objective(const AnalysisFrame& frame, const Weights& v, const CVector& z) {
  if (v.size() != frame.p()) throw DimensionError("objective: weight length differs from p");
  return v.values().dot(frame.analyze(z).cwiseAbs());
}

namespace {

CVector project_ball(const CVector& x, const CVector& center, double radius) {
  CVector d = x - center;
  const double norm = d.norm();
  if (norm <= radius) return x;
  return center + d * (radius / norm);
}

double real_inner(const CVector& a, const CVector& b) { return a.dot(b).real(); }

}  // namespace

SolverResult solve(const CMatrix& A, const CVector& y, const AnalysisFrame& frame,
                   const Weights& v, double eta, const SolverOptions& opts) {
  const Eigen::Index n = frame.n();
  const Eigen::Index p = frame.p();
  if (A.cols() != n) {
    throw DimensionError("solve: A has " + std::to_string(A.cols()) + " columns, frame has n = " +
                         std::to_string(n));
  }
  if (y.size() != A.rows()) throw DimensionError("solve: y length differs from rows of A");
  if (v.size() != p) throw DimensionError("solve: weight length differs from p");
  if (!(eta >= 0.0)) throw DimensionError("solve: eta must be >= 0");

  const CMatrix& omega = frame.omega();
  const bool orthogonal = frame.mode() == FrameMode::orthogonal;

  // The minimizer set does not depend on the weight scale.
  const double weight_scale = v.max();
  const RVector w = v.values() / weight_scale;

  // Least-squares start; also decides feasibility.
  const CVector z_ls = A.completeOrthogonalDecomposition().solve(y);
  const double ls_residual = (y - A * z_ls).norm();
  if (ls_residual > eta + opts.tol_feas) {
    throw FeasibilityError("solve: min ||y - Az|| = " + std::to_string(ls_residual) +
                           " exceeds eta = " + std::to_string(eta));
  }

  // Balance the measurement block against Omega by working with kappa A,
  // kappa y and kappa eta. The minimizer is unchanged but the ADMM
  // convergence rate depends strongly on kappa.
  auto spectral_norm = [](const CMatrix& gram) {
    return std::sqrt(std::max(
        Eigen::SelfAdjointEigenSolver<CMatrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(),
        0.0));
  };
  CMatrix system = A.adjoint() * A;
  std::optional<Eigen::LLT<CMatrix>> frame_gram;
  double omega_norm = 1.0;
  if (!orthogonal) {
    const CMatrix gram = omega.adjoint() * omega;
    frame_gram.emplace(gram);
    omega_norm = spectral_norm(gram);
  }
  const double a_norm = spectral_norm(system);
  const double balance =
      opts.measurement_balance == 0.0 ? (eta == 0.0 ? 30.0 : 3.0) : opts.measurement_balance;
  const double a_scale = balance > 0.0 && a_norm > 0.0 ? balance * omega_norm / a_norm : 1.0;
  const CMatrix As = A * a_scale;
  const CVector ys = y * a_scale;
  const double etas = eta * a_scale;
  const double tol_feas = opts.tol_feas * a_scale;
  system *= a_scale * a_scale;
  if (orthogonal) {
    system.diagonal().array() += 1.0;
  } else {
    system += omega.adjoint() * omega;
  }
  const Eigen::LLT<CMatrix> chol(system);
  if (chol.info() != Eigen::Success) throw DimensionError("solve: z-step system is singular");

  CVector z = z_ls;
  CVector Oz = omega * z;
  CVector Az = As * z;
  CVector u = Oz;
  CVector s = project_ball(Az, ys, etas);
  CVector lu = CVector::Zero(p);
  CVector ls = CVector::Zero(As.rows());
  CVector u_prev = u;
  CVector s_prev = s;
  double rho = opts.rho;

  SolverResult result;
  result.converged = false;

  auto lower_bound = [&](double rho_now) {
    // Dual point (wd, nu) = rho * (lu, ls); restore Omega^H wd + A^H nu = 0 and
    // |wd_k| <= w_k, then evaluate -Re<nu, y> - eta ||nu||.
    CVector nu = rho_now * ls;
    CVector wd = rho_now * lu;
    CVector defect = omega.adjoint() * wd + As.adjoint() * nu;
    if (orthogonal) {
      wd -= omega * defect;
    } else {
      wd -= omega * frame_gram->solve(defect);
    }
    double scale = 1.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      const double mag = std::abs(wd[k]);
      if (mag > w[k]) scale = std::min(scale, w[k] / mag);
    }
    const double value = scale * (-real_inner(nu, ys) - etas * nu.norm());
    return std::max(0.0, value);
  };

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const bool check = (iter + 1) % opts.check_every == 0;
    if (check) {
      u_prev = u;
      s_prev = s;
    }
    z = chol.solve(omega.adjoint() * (u - lu) + As.adjoint() * (s - ls));
    Oz.noalias() = omega * z;
    Az.noalias() = As * z;

    // Over-relaxed splitting: the u- and s-steps see a blend of the new
    // analysis image and the previous auxiliary variables.
    const double alpha = opts.relaxation;
    const CVector Oz_hat = alpha * Oz + (1.0 - alpha) * u;
    const CVector Az_hat = alpha * Az + (1.0 - alpha) * s;
    const double inv_rho = 1.0 / rho;
    for (Eigen::Index k = 0; k < p; ++k) {
      u[k] = soft_threshold(Oz_hat[k] + lu[k], w[k] * inv_rho);
    }
    s = project_ball(Az_hat + ls, ys, etas);
    lu += Oz_hat - u;
    ls += Az_hat - s;

    if (!check) continue;

    const double primal = std::sqrt((Oz - u).squaredNorm() + (Az - s).squaredNorm());
    const double dual =
        rho * (omega.adjoint() * (u - u_prev) + As.adjoint() * (s - s_prev)).norm();
    result.primal_residual = primal;
    result.dual_residual = dual;

    const double residual = (ys - Az).norm();
    if (residual <= etas + tol_feas) {
      const double obj = w.dot(Oz.cwiseAbs());
      const double lower = lower_bound(rho);
      if (obj - lower <= opts.tol_opt * std::max(1.0, obj)) {
        result.converged = true;
        result.dual_bound = lower * weight_scale;
        ++iter;
        break;
      }
    }

    if (opts.adapt_rho && (opts.adapt_until <= 0 || iter < opts.adapt_until)) {
      if (primal > opts.rho_ratio * dual) {
        rho *= opts.rho_factor;
        lu /= opts.rho_factor;
        ls /= opts.rho_factor;
      } else if (dual > opts.rho_ratio * primal) {
        rho /= opts.rho_factor;
        lu *= opts.rho_factor;
        ls *= opts.rho_factor;
      }
    }
  }

  if (!result.converged) result.dual_bound = lower_bound(rho) * weight_scale;
  result.estimate = z;
  result.iterations = iter;
  result.rho = rho;
  result.residual = (y - A * z).norm();
  result.objective = v.values().dot((omega * z).cwiseAbs());
  return result;
}

}  // namespace angsparse
