#pragma once

// 50-digit references for erf and q(t).

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_dec_float_50;

inline Big big_erf(const Big& x) { return boost::math::erf(x); }

inline Big big_q(const Big& t) {
  using boost::multiprecision::exp;
  using boost::multiprecision::sqrt;
  const Big pi = boost::math::constants::pi<Big>();
  // erfc keeps the tail exact where erf - 1 would cancel.
  return sqrt(Big(2) / pi) * exp(-t * t / 2) / t - boost::math::erfc(t / sqrt(Big(2)));
}

inline double erf_ref(double x) { return static_cast<double>(big_erf(Big(x))); }
inline double q_ref(double t) { return static_cast<double>(big_q(Big(t))); }

}  // namespace oracle
