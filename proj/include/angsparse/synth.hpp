#pragma once

#include <cstdint>
#include <vector>

#include "angsparse/frame.hpp"
#include "angsparse/priors.hpp"
#include "angsparse/rng.hpp"

namespace angsparse {

struct ChannelRealization {
  CVector h;                   // spatial channel, unit norm
  CVector h_a;                 // Omega h
  std::vector<int> support;    // ascending
  std::vector<int> cosupport;  // ascending, |cosupport| < n
};

// Draws |cosupport| = ell bins without replacement, each draw proportional to
// (1 - beta_k) over the bins not yet taken. ell < n is required because the
// channel must live in a nontrivial null space.
std::vector<int> sample_cosupport(const RVector& beta, int ell, int n, Rng& rng);

// Null-space threshold, relative to the largest singular value of Omega_cosupport.
inline constexpr double kNullSpaceRelTol = 1e-10;

// h = N c with N an orthonormal basis of null(Omega_cosupport) and c uniform on
// the unit sphere of the frame's field.
ChannelRealization synth_channel(const AnalysisFrame& frame,
                                 const std::vector<int>& cosupport, Rng& rng);

enum class NoiseModel {
  sphere,    // e uniform on the sphere of radius eta, ||e|| = eta exactly
  gaussian,  // e ~ N(0, eta^2/m I), eta_effective = ||e||
};

const char* to_string(NoiseModel model);
NoiseModel noise_model_from_string(const std::string& name);

struct PilotSetup {
  CMatrix A;
  int m = 0;
  Field field = Field::complex;
  std::uint64_t pilot_seed = 0;
};

PilotSetup gen_pilots(int m, int n, Field field, std::uint64_t seed);

struct Measurement {
  CVector y;
  CVector noise;
  // Noise budget the solver should use: eta for the sphere model, ||e|| for
  // the Gaussian model.
  double eta = 0.0;
  std::uint64_t noise_seed = 0;
};

Measurement measure(const PilotSetup& setup, const CVector& h, double eta,
                    std::uint64_t seed, NoiseModel model = NoiseModel::sphere);

}  // namespace angsparse
