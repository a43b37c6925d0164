#include "angsparse/frame.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "angsparse/error.hpp"

namespace angsparse {

const char* to_string(FrameMode mode) {
  return mode == FrameMode::orthogonal ? "orthogonal" : "general";
}

FrameMode frame_mode_from_string(const std::string& name) {
  if (name == "orthogonal") return FrameMode::orthogonal;
  if (name == "general") return FrameMode::general;
  throw ConfigError("unknown frame mode '" + name + "' (expected orthogonal|general)");
}

AngularGrid AngularGrid::uniform(int n, int p, double spacing) {
  AngularGrid grid;
  grid.n = n;
  grid.p = p;
  grid.spacing = spacing;
  grid.sin_theta.resize(p > 0 ? static_cast<std::size_t>(p) : 0);
  for (int k = 0; k < p; ++k) grid.sin_theta[k] = -1.0 + 2.0 * k / p;
  return grid;
}

bool AngularGrid::is_uniform(double tol) const {
  if (static_cast<int>(sin_theta.size()) != p) return false;
  for (int k = 0; k < p; ++k) {
    if (std::abs(sin_theta[k] - (-1.0 + 2.0 * k / p)) > tol) return false;
  }
  return true;
}

AnalysisFrame::AnalysisFrame(CMatrix omega, FrameMode mode, Field field,
                             std::optional<AngularGrid> grid)
    : omega_(std::move(omega)), mode_(mode), field_(field), grid_(std::move(grid)) {
  if (omega_.rows() < omega_.cols() || omega_.cols() < 1) {
    throw DimensionError("analysis operator must be p x n with p >= n >= 1, got " +
                         std::to_string(omega_.rows()) + " x " +
                         std::to_string(omega_.cols()));
  }
  row_norms_ = omega_.rowwise().norm();
  if ((row_norms_.array() <= 0.0).any()) {
    throw DimensionError("analysis operator has a zero row");
  }
  // omega_i^H omega_j = sum_l conj(Omega_il) Omega_jl
  const CMatrix cross = omega_.conjugate() * omega_.transpose();
  gram_real_ = cross.real();
  coherence_ = cross.cwiseAbs2().array() /
               (row_norms_ * row_norms_.transpose()).array();
}

CVector AnalysisFrame::analyze(const CVector& x) const {
  if (x.size() != omega_.cols()) {
    throw DimensionError("analyze: expected vector of length " +
                         std::to_string(omega_.cols()) + ", got " +
                         std::to_string(x.size()));
  }
  return omega_ * x;
}

CVector AnalysisFrame::adjoint(const CVector& u) const {
  if (u.size() != omega_.rows()) {
    throw DimensionError("synthesize_adjoint: expected vector of length " +
                         std::to_string(omega_.rows()) + ", got " +
                         std::to_string(u.size()));
  }
  return omega_.adjoint() * u;
}

double AnalysisFrame::gram_defect() const {
  const auto n = omega_.cols();
  return (omega_.adjoint() * omega_ - CMatrix::Identity(n, n)).norm();
}

namespace {

CMatrix steering_matrix(const AngularGrid& grid) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.p));
  CMatrix omega(grid.p, grid.n);
  for (int k = 0; k < grid.p; ++k) {
    const double phase = -2.0 * std::numbers::pi * grid.spacing * grid.sin_theta[k];
    for (int l = 0; l < grid.n; ++l) omega(k, l) = scale * std::polar(1.0, phase * l);
  }
  return omega;
}

void check_grid(const AngularGrid& grid) {
  if (grid.n < 1) throw DimensionError("frame: n must be >= 1");
  if (grid.p < grid.n) {
    throw DimensionError("frame: p (" + std::to_string(grid.p) + ") < n (" +
                         std::to_string(grid.n) + ")");
  }
  if (!(grid.spacing > 0.0)) throw DimensionError("frame: spacing must be positive");
  if (static_cast<int>(grid.sin_theta.size()) != grid.p) {
    throw DimensionError("frame: grid has " + std::to_string(grid.sin_theta.size()) +
                         " points, expected p = " + std::to_string(grid.p));
  }
  for (std::size_t k = 0; k < grid.sin_theta.size(); ++k) {
    const double s = grid.sin_theta[k];
    if (!(s >= -1.0 && s < 1.0)) throw DimensionError("frame: grid point outside [-1, 1)");
    if (k > 0 && !(s > grid.sin_theta[k - 1])) {
      throw DimensionError("frame: grid points must be strictly increasing");
    }
  }
}

}  // namespace

AnalysisFrame build_frame(const AngularGrid& grid, FrameMode mode) {
  check_grid(grid);
  if (mode == FrameMode::orthogonal && (!grid.is_uniform() || grid.spacing != 0.5)) {
    throw ModeError("orthogonal mode requires the uniform sin(theta) grid and d = 0.5");
  }
  return AnalysisFrame(steering_matrix(grid), mode, Field::complex, grid);
}

AnalysisFrame build_frame(int n, int p, double spacing, FrameMode mode) {
  return build_frame(AngularGrid::uniform(n, p, spacing), mode);
}

AnalysisFrame identity_frame(int n) {
  if (n < 1) throw DimensionError("identity_frame: n must be >= 1");
  return AnalysisFrame(CMatrix::Identity(n, n), FrameMode::orthogonal, Field::real);
}

AnalysisFrame real_frame(int n, int p) {
  if (n < 2 || p < n || n % 2 != 0 || p % 2 != 0) {
    throw DimensionError("real_frame: need even n >= 2 and even p >= n, got n = " +
                         std::to_string(n) + ", p = " + std::to_string(p));
  }
  const AngularGrid grid = AngularGrid::uniform(n / 2, p / 2, 0.5);
  const CMatrix base = steering_matrix(grid);
  const int half = n / 2;
  CMatrix omega = CMatrix::Zero(p, n);
  for (int k = 0; k < p / 2; ++k) {
    for (int l = 0; l < half; ++l) {
      const double re = base(k, l).real();
      const double im = base(k, l).imag();
      omega(2 * k, l) = re;
      omega(2 * k, half + l) = -im;
      omega(2 * k + 1, l) = im;
      omega(2 * k + 1, half + l) = re;
    }
  }
  return AnalysisFrame(std::move(omega), FrameMode::orthogonal, Field::real, grid);
}

AnalysisFrame make_frame(int n, int p, double spacing, FrameMode mode, Field field) {
  if (field == Field::complex) return build_frame(n, p, spacing, mode);
  if (mode != FrameMode::orthogonal || spacing != 0.5) {
    throw ModeError("real field frames exist only in orthogonal mode with d = 0.5");
  }
  return real_frame(n, p);
}

CVector analyze(const AnalysisFrame& frame, const CVector& x) { return frame.analyze(x); }

CVector synthesize_adjoint(const AnalysisFrame& frame, const CVector& u) {
  return frame.adjoint(u);
}

}  // namespace angsparse
