#pragma once

// min_{t >= 0, |u_k| <= t} ||g - t b - M u||^2 by an outer search over t
// (grid, then golden section around the best grid point) with the inner
// box-constrained least squares solved by exact cyclic coordinate descent.

#include <algorithm>
#include <cmath>

#include "angsparse/types.hpp"

namespace oracle {

using angsparse::Complex;
using angsparse::CMatrix;
using angsparse::CVector;

inline double box_least_squares(const CVector& target, const CMatrix& M, double t,
                                int max_sweeps = 200000) {
  const Eigen::Index cols = M.cols();
  CVector u = CVector::Zero(cols);
  CVector r = target;
  if (cols == 0 || t == 0.0) return r.squaredNorm();
  Eigen::VectorXd col_norm2(cols);
  for (Eigen::Index k = 0; k < cols; ++k) col_norm2[k] = M.col(k).squaredNorm();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Complex free = u[k] + M.col(k).dot(r) / col_norm2[k];
      const double mag = std::abs(free);
      const Complex clipped = mag > t ? free * (t / mag) : free;
      const Complex delta = clipped - u[k];
      if (delta != Complex(0.0, 0.0)) {
        r -= M.col(k) * delta;
        u[k] = clipped;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change < 1e-15) break;
  }
  return r.squaredNorm();
}

inline double cone_distance_grid(const CVector& g, const CVector& b, const CMatrix& M,
                                 double t_max, int grid = 400) {
  auto value = [&](double t) { return box_least_squares(g - t * b, M, t); };
  double best_t = 0.0;
  double best = value(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double t = t_max * i / grid;
    const double f = value(t);
    if (f < best) {
      best = f;
      best_t = t;
    }
  }
  double lo = std::max(0.0, best_t - t_max / grid);
  double hi = std::min(t_max, best_t + t_max / grid);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
  double fc = value(c), fd = value(d);
  while (hi - lo > 1e-12 * std::max(1.0, t_max)) {
    if (fc < fd) {
      hi = d; d = c; fd = fc; c = hi - r * (hi - lo); fc = value(c);
    } else {
      lo = c; c = d; fc = fd; d = lo + r * (hi - lo); fd = value(d);
    }
  }
  return std::min({best, fc, fd});
}

}  // namespace oracle
