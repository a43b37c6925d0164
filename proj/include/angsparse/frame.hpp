#pragma once

#include <optional>
#include <vector>

#include "angsparse/types.hpp"

namespace angsparse {

enum class FrameMode { orthogonal, general };

const char* to_string(FrameMode mode);
FrameMode frame_mode_from_string(const std::string& name);

// Angular sampling of a uniform linear array: n antennas spaced `spacing`
// wavelengths apart, p bins at the given sin(theta) values.
struct AngularGrid {
  int n = 0;
  int p = 0;
  double spacing = 0.5;
  std::vector<double> sin_theta;

  // sin_theta_k = -1 + 2k/p, the full-period grid on which the steering
  // frame is tight.
  static AngularGrid uniform(int n, int p, double spacing = 0.5);

  bool is_uniform(double tol = 1e-12) const;
};

// The p x n analysis operator. Row k is omega_k^T, so (Omega x)_k = omega_k^T x.
//
// Immutable after construction. Besides the matrix it caches the row norms
// and the two p x p cross-Gram tables used by the bound evaluators:
//   gram_real(i,j)  = Re(omega_i^H omega_j)
//   coherence(i,j)  = |omega_i^H omega_j|^2 / (|omega_i| |omega_j|)
class AnalysisFrame {
 public:
  AnalysisFrame(CMatrix omega, FrameMode mode, Field field,
                std::optional<AngularGrid> grid = std::nullopt);

  int n() const { return static_cast<int>(omega_.cols()); }
  int p() const { return static_cast<int>(omega_.rows()); }
  FrameMode mode() const { return mode_; }
  Field field() const { return field_; }
  const std::optional<AngularGrid>& grid() const { return grid_; }

  const CMatrix& omega() const { return omega_; }
  const RVector& row_norms() const { return row_norms_; }
  const RMatrix& gram_real() const { return gram_real_; }
  const RMatrix& coherence() const { return coherence_; }

  CVector analyze(const CVector& x) const;
  CVector adjoint(const CVector& u) const;

  // ||Omega^H Omega - I_n||_F
  double gram_defect() const;

 private:
  CMatrix omega_;
  FrameMode mode_;
  Field field_;
  std::optional<AngularGrid> grid_;
  RVector row_norms_;
  RMatrix gram_real_;
  RMatrix coherence_;
};

// Steering-vector frame, row k = p^{-1/2} [exp(-j 2 pi l d sin(theta_k))]_{l<n}.
// Orthogonal mode places the grid uniformly in sin(theta) and requires d = 0.5.
AnalysisFrame build_frame(int n, int p, double spacing = 0.5,
                          FrameMode mode = FrameMode::orthogonal);
AnalysisFrame build_frame(const AngularGrid& grid, FrameMode mode);

// Omega = I_n, real field. The classical (synthesis) l1 setting.
AnalysisFrame identity_frame(int n);

// Real tight frame of size p x n: the real isomorphic image of the complex
// orthogonal frame with n/2 antennas and p/2 bins. Rows 2k and 2k+1 map x to
// Re and Im of omega_k^T (x_re + j x_im). Requires even n and p.
AnalysisFrame real_frame(int n, int p);

// Frame for a given configuration: complex steering frame, or real_frame for
// the real field.
AnalysisFrame make_frame(int n, int p, double spacing, FrameMode mode, Field field);

CVector analyze(const AnalysisFrame& frame, const CVector& x);
CVector synthesize_adjoint(const AnalysisFrame& frame, const CVector& u);

}  // namespace angsparse
