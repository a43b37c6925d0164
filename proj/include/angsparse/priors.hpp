#pragma once

#include <span>
#include <string>
#include <vector>

#include "angsparse/types.hpp"

namespace angsparse {

// Angular prior of a channel ensemble.
//   beta(k)          = P(k in S)
//   beta_joint(i,j)  = P(i in S, j in S)
//   sigma(i,j)       = Re E[sgn(h_a(i)) conj(sgn(h_a(j)))]
// with sgn(x) = x/|x| on the support and 0 off it.
struct ChannelPrior {
  RVector beta;
  RMatrix beta_joint;
  RMatrix sigma;

  int p() const { return static_cast<int>(beta.size()); }

  // Throws PriorError on the first violated invariant. `slack` absorbs
  // floating-point error in the Frechet and sign bounds.
  void validate(double slack = 1e-12) const;
};

ChannelPrior make_prior(RVector beta, RMatrix beta_joint, RMatrix sigma);

// Independent supports, sign-symmetric amplitudes.
ChannelPrior independent_symmetric_prior(std::span<const double> beta);
ChannelPrior independent_symmetric_prior(const RVector& beta);

// Empirical prior over analysis images h_a. Bin k is in the support of a
// sample when |h_a(k)| > zero_tol * max_k |h_a(k)|.
ChannelPrior estimate_prior(std::span<const CVector> samples, double zero_tol = 1e-9);

// Two-column CSV, header `bin_index,beta`. Bins must be 0..p-1 in any order.
std::vector<double> read_beta_csv(const std::string& path);
void write_beta_csv(const std::string& path, std::span<const double> beta);

// Full prior, header `i,j,beta_joint,sigma`, one row per ordered pair in
// row-major order. beta is read from the diagonal of beta_joint.
ChannelPrior read_prior_csv(const std::string& path);
void write_prior_csv(const std::string& path, const ChannelPrior& prior);

}  // namespace angsparse
