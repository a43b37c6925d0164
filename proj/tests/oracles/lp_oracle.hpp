#pragma once

// Reference solvers for min_z sum_k w_k |(Omega z)_k| s.t. ||y - A z|| <= eta.
//
// vertex_enumeration: real data, eta = 0. With z = z0 + N c (N spanning
// null(A)), the objective is convex piecewise linear in c and attains its
// minimum where dim(c) independent rows of Omega N vanish. All such row
// subsets are enumerated.
//
// barrier_solve: real or complex data, any eta >= 0. Log-barrier method on
// (c, s) with the second-order cones |(Omega z)_k| <= s_k and, for eta > 0,
// the ball ||y - A z||^2 <= eta^2; damped Newton steps, mu multiplied by 8
// until the duality-gap estimate (#barrier terms)/mu drops below 1e-11.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "angsparse/types.hpp"

namespace oracle {

using angsparse::CMatrix;
using angsparse::CVector;
using angsparse::RMatrix;
using angsparse::RVector;

inline RMatrix null_basis(const RMatrix& A) {
  if (A.rows() == 0) return RMatrix::Identity(A.cols(), A.cols());
  Eigen::JacobiSVD<RMatrix> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv[i] > 1e-10 * sv[0];
  return svd.matrixV().rightCols(A.cols() - rank);
}

inline double vertex_enumeration(const RMatrix& A, const RVector& y, const RMatrix& omega,
                                 const RVector& w, RVector* argmin = nullptr) {
  const RVector z0 = A.completeOrthogonalDecomposition().solve(y);
  const RMatrix N = null_basis(A);
  const int d = static_cast<int>(N.cols());
  const int p = static_cast<int>(omega.rows());
  auto objective = [&](const RVector& z) { return w.dot((omega * z).cwiseAbs()); };
  double best = objective(z0);
  RVector best_z = z0;
  if (d == 0) {
    if (argmin) *argmin = best_z;
    return best;
  }
  const RMatrix B = omega * N;
  const RVector r0 = omega * z0;
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  while (true) {
    RMatrix S(d, d);
    RVector rhs(d);
    for (int i = 0; i < d; ++i) {
      S.row(i) = B.row(idx[i]);
      rhs[i] = -r0[idx[i]];
    }
    Eigen::FullPivLU<RMatrix> lu(S);
    if (lu.rank() == d) {
      const RVector z = z0 + N * lu.solve(rhs);
      const double value = objective(z);
      if (value < best) {
        best = value;
        best_z = z;
      }
    }
    int i = d - 1;
    while (i >= 0 && idx[i] == p - d + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (argmin) *argmin = best_z;
  return best;
}

// Real image of a complex matrix acting on [Re x; Im x].
inline RMatrix realify(const CMatrix& M) {
  RMatrix R(2 * M.rows(), 2 * M.cols());
  R << M.real(), -M.imag(), M.imag(), M.real();
  return R;
}

struct BarrierResult {
  double objective = 0.0;
  CVector z;
  bool ok = false;
};

inline BarrierResult barrier_solve(const CMatrix& A_c, const CVector& y_c, const CMatrix& omega_c,
                                   const RVector& w, double eta, bool real_data) {
  const int p = static_cast<int>(omega_c.rows());
  const int n = static_cast<int>(omega_c.cols());
  // Real variables x and the per-row blocks R_k with (Omega z)_k ~ R_k x.
  RMatrix A, Om;
  RVector y;
  int rows_per_bin;
  if (real_data) {
    A = A_c.real();
    Om = omega_c.real();
    y = y_c.real();
    rows_per_bin = 1;
  } else {
    A = realify(A_c);
    const RMatrix full = realify(omega_c);
    Om.resize(2 * p, 2 * n);
    for (int k = 0; k < p; ++k) {
      Om.row(2 * k) = full.row(k);
      Om.row(2 * k + 1) = full.row(p + k);
    }
    y.resize(2 * y_c.size());
    y << y_c.real(), y_c.imag();
    rows_per_bin = 2;
  }
  const int dim_x = static_cast<int>(A.cols());

  RVector x0 = A.completeOrthogonalDecomposition().solve(y);
  RMatrix N = eta == 0.0 ? null_basis(A) : RMatrix::Identity(dim_x, dim_x);
  const bool ball = eta > 0.0;
  const int dc = static_cast<int>(N.cols());
  const int dim = dc + p;
  const RMatrix B = Om * N;
  const RMatrix C = A * N;

  RVector c = RVector::Zero(dc);
  RVector s(p);
  {
    const RVector r = Om * x0;
    for (int k = 0; k < p; ++k) s[k] = r.segment(k * rows_per_bin, rows_per_bin).norm() + 1.0;
  }

  const double inf = std::numeric_limits<double>::infinity();
  auto barrier = [&](const RVector& cc, const RVector& ss, double mu) {
    const RVector r = Om * x0 + B * cc;
    double f = mu * w.dot(ss);
    for (int k = 0; k < p; ++k) {
      const double g = ss[k] * ss[k] - r.segment(k * rows_per_bin, rows_per_bin).squaredNorm();
      if (!(g > 0.0) || !(ss[k] > 0.0)) return inf;
      f -= std::log(g);
    }
    if (ball) {
      const double slack = eta * eta - (y - A * x0 - C * cc).squaredNorm();
      if (!(slack > 0.0)) return inf;
      f -= std::log(slack);
    }
    return f;
  };

  const double terms = p + (ball ? 1.0 : 0.0);
  double mu = 1.0;
  BarrierResult out;
  for (int outer = 0; outer < 200; ++outer) {
    for (int newton = 0; newton < 200; ++newton) {
      RVector grad = RVector::Zero(dim);
      RMatrix hess = RMatrix::Zero(dim, dim);
      grad.tail(p) = mu * w;
      const RVector r = Om * x0 + B * c;
      for (int k = 0; k < p; ++k) {
        const auto rk = r.segment(k * rows_per_bin, rows_per_bin);
        const RMatrix Bk = B.middleRows(k * rows_per_bin, rows_per_bin);
        const double g = s[k] * s[k] - rk.squaredNorm();
        RVector dg = RVector::Zero(dim);
        dg.head(dc) = -2.0 * Bk.transpose() * rk;
        dg[dc + k] = 2.0 * s[k];
        grad -= dg / g;
        hess += dg * dg.transpose() / (g * g);
        hess.topLeftCorner(dc, dc) += 2.0 * Bk.transpose() * Bk / g;
        hess(dc + k, dc + k) -= 2.0 / g;
      }
      if (ball) {
        const RVector e = y - A * x0 - C * c;
        const double slack = eta * eta - e.squaredNorm();
        RVector ds = RVector::Zero(dim);
        ds.head(dc) = 2.0 * C.transpose() * e;
        grad -= ds / slack;
        hess += ds * ds.transpose() / (slack * slack);
        hess.topLeftCorner(dc, dc) += 2.0 * C.transpose() * C / slack;
      }
      const RVector step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (decrement < 1e-14) break;
      double alpha = 1.0;
      const double f0 = barrier(c, s, mu);
      while (alpha > 1e-16) {
        const double f1 = barrier(c + alpha * step.head(dc), s + alpha * step.tail(p), mu);
        if (f1 <= f0 - 0.25 * alpha * decrement) break;
        alpha *= 0.5;
      }
      c += alpha * step.head(dc);
      s += alpha * step.tail(p);
      if (alpha <= 1e-16) break;
    }
    if (terms / mu < 1e-11) {
      out.ok = true;
      break;
    }
    mu *= 8.0;
  }
  const RVector x = x0 + N * c;
  if (real_data) {
    out.z = x.cast<angsparse::Complex>();
  } else {
    out.z = CVector(n);
    for (int l = 0; l < n; ++l) out.z[l] = {x[l], x[n + l]};
  }
  out.objective = w.dot((omega_c * out.z).cwiseAbs());
  return out;
}

}  // namespace oracle
