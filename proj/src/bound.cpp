#include "angsparse/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "angsparse/error.hpp"

namespace angsparse {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

void check_shapes(const Weights& v, const AnalysisFrame& frame, const ChannelPrior& prior) {
  if (v.size() != frame.p() || prior.p() != frame.p()) {
    throw DimensionError("bound: weights (" + std::to_string(v.size()) + "), prior (" +
                         std::to_string(prior.p()) + ") and frame (" +
                         std::to_string(frame.p()) + ") disagree on p");
  }
}

}  // namespace

double q_func(double t) {
  if (!(t > 0.0)) throw DimensionError("q_func: t must be positive");
  const double gauss = kSqrt2OverPi * std::exp(-0.5 * t * t) / t;
  if (t <= 8.0) return gauss - std::erfc(t * kInvSqrt2);
  // Both terms agree to leading order; use the asymptotic expansion of the
  // Mills ratio, 1 - t M(t) = 1/t^2 - 3/t^4 + 15/t^6 - ...
  const double inv_t2 = 1.0 / (t * t);
  double term = inv_t2;
  double sum = 0.0;
  for (int k = 1; k < 40; ++k) {
    sum += term;
    const double next = -term * (2.0 * k + 1.0) * inv_t2;
    if (std::abs(next) >= std::abs(term) || std::abs(next) < 1e-18 * std::abs(sum)) break;
    term = next;
  }
  return gauss * sum;
}

const char* to_string(PairExtremes extremes) {
  return extremes == PairExtremes::per_pair ? "per_pair" : "global";
}

PairExtremes pair_extremes_from_string(const std::string& name) {
  if (name == "per_pair") return PairExtremes::per_pair;
  if (name == "global") return PairExtremes::global;
  throw ConfigError("unknown pair extremes '" + name + "' (expected per_pair|global)");
}

BoundEvaluator::BoundEvaluator(const Weights& v, const AnalysisFrame& frame,
                               const ChannelPrior& prior, PairExtremes extremes)
    : n_(frame.n()), extremes_(extremes), v_(v.values()) {
  check_shapes(v, frame, prior);
  const Eigen::Index p = frame.p();
  numerator_coeff_ = (1.0 - prior.beta.array()) * frame.row_norms().array();

  const RMatrix sign_table = frame.gram_real().cwiseProduct(prior.sigma);
  sign_energy_ = v_.dot(sign_table * v_);

  // coh_ij * P(i, j both off the support)
  RMatrix off_mass = frame.coherence();
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      off_mass(i, j) *= 1.0 - prior.beta[i] - prior.beta[j] + prior.beta_joint(i, j);
    }
  }

  v_min_ = v_.minCoeff();
  v_max_ = v_.maxCoeff();
  if (extremes_ == PairExtremes::global) {
    cross_mass_ = off_mass.sum();
    cross_energy_ = v_.dot(off_mass * v_);
    return;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return v_[a] < v_[b]; });
  std::vector<Eigen::Index> rank(static_cast<std::size_t>(p));
  for (Eigen::Index r = 0; r < p; ++r) rank[order[r]] = r;

  as_min_ = RVector::Zero(p);
  as_max_ = RVector::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    as_min_[i] += off_mass(i, i);
    as_max_[i] += off_mass(i, i) * v_[i] * v_[i];
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double mass = off_mass(i, j) + off_mass(j, i);
      const Eigen::Index lo = rank[i] < rank[j] ? i : j;
      const Eigen::Index hi = lo == i ? j : i;
      as_min_[lo] += mass;
      as_max_[hi] += mass * v_[i] * v_[j];
    }
  }
}

double BoundEvaluator::numerator(double t) const {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < v_.size(); ++k) {
    sum += numerator_coeff_[k] * std::erf(t * v_[k] * kInvSqrt2);
  }
  return sum;
}

double BoundEvaluator::denominator(double t) const {
  const double t2 = t * t;
  double value = t2 * sign_energy_;
  if (extremes_ == PairExtremes::global) {
    value += std::erf(t * v_min_ * kInvSqrt2) * cross_mass_ -
             q_func(t * v_max_) * t2 * cross_energy_;
    return value;
  }
  for (Eigen::Index k = 0; k < v_.size(); ++k) {
    const double a = t * v_[k];
    value += std::erf(a * kInvSqrt2) * as_min_[k] - q_func(a) * t2 * as_max_[k];
  }
  return value;
}

double BoundEvaluator::infimand(double t) const {
  const double f = denominator(t);
  if (!(f > 0.0)) return std::numeric_limits<double>::infinity();
  const double num = numerator(t);
  return n_ - num * num / f;
}

double bound_numerator(double t, const Weights& v, const AnalysisFrame& frame,
                       const ChannelPrior& prior) {
  check_shapes(v, frame, prior);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    sum += (1.0 - prior.beta[k]) * frame.row_norms()[k] * std::erf(t * v[k] * kInvSqrt2);
  }
  return sum;
}

double bound_denominator(double t, const Weights& v, const AnalysisFrame& frame,
                         const ChannelPrior& prior, PairExtremes extremes) {
  if (!(t > 0.0)) throw DimensionError("bound_denominator: t must be positive");
  return BoundEvaluator(v, frame, prior, extremes).denominator(t);
}

BoundReport statdim_upper(const Weights& v, const AnalysisFrame& frame,
                          const ChannelPrior& prior, const TSearch& search) {
  if (!(search.lo > 0.0) || !(search.hi > search.lo) || search.resolution < 2) {
    throw DimensionError("statdim_upper: empty t search interval");
  }
  const BoundEvaluator eval(v, frame, prior, search.extremes);
  const int n = frame.n();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const double log_lo = std::log(search.lo);
  const double log_step = (std::log(search.hi) - log_lo) / (search.resolution - 1);
  double best_value = kInf;
  double best_t = 0.0;
  int best_index = -1;
  for (int i = 0; i < search.resolution; ++i) {
    const double t = std::exp(log_lo + i * log_step);
    const double value = eval.infimand(t);
    if (value < best_value) {
      best_value = value;
      best_t = t;
      best_index = i;
    }
  }

  if (best_index >= 0) {
    // Golden section on log t between the neighbours of the best grid point.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = log_lo + std::max(best_index - 1, 0) * log_step;
    double b = log_lo + std::min(best_index + 1, search.resolution - 1) * log_step;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = eval.infimand(std::exp(c));
    double fd = eval.infimand(std::exp(d));
    const double log_tol = std::log1p(search.rel_tol);
    while (b - a > log_tol) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = eval.infimand(std::exp(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = eval.infimand(std::exp(d));
      }
    }
    const double t_mid = std::exp(0.5 * (a + b));
    const double candidates[] = {std::exp(c), std::exp(d), t_mid};
    for (double t : candidates) {
      const double value = eval.infimand(t);
      if (value < best_value) {
        best_value = value;
        best_t = t;
      }
    }
  }
  if (search.lo <= 1.0 && 1.0 <= search.hi) {
    const double value = eval.infimand(1.0);
    if (value < best_value) {
      best_value = value;
      best_t = 1.0;
    }
  }

  BoundReport report;
  report.n = n;
  if (!std::isfinite(best_value) || best_value >= n) {
    report.statdim_upper = n;
    report.valid = false;
    if (std::isfinite(best_value)) {
      report.t_star = best_t;
      report.lambda_star = eval.numerator(best_t) / eval.denominator(best_t);
    }
    return report;
  }
  report.valid = true;
  report.t_star = best_t;
  report.lambda_star = eval.numerator(best_t) / eval.denominator(best_t);
  report.statdim_upper = std::clamp(best_value, 0.0, static_cast<double>(n));
  return report;
}

ErrorBound error_upper(double statdim, int m, double eta, double a) {
  if (m < 2) throw DimensionError("error_upper: m must be >= 2");
  if (!(eta >= 0.0) || !(a >= 0.0) || !(statdim >= 0.0)) {
    throw DimensionError("error_upper: eta, a and statdim must be >= 0");
  }
  ErrorBound out;
  out.probability = 1.0 - std::exp(-0.5 * a * a);
  const double denom = std::sqrt(m - 1.0) - std::sqrt(statdim) - a;
  if (!(denom > 0.0)) {
    out.value = std::numeric_limits<double>::infinity();
    out.finite = false;
    return out;
  }
  out.value = 2.0 * eta / denom;
  out.finite = true;
  return out;
}

ErrorBound error_upper(const BoundReport& report, int m, double eta, double a) {
  return error_upper(report.statdim_upper, m, eta, a);
}

double lambda_star(double t, const Weights& v, const AnalysisFrame& frame,
                   const ChannelPrior& prior, PairExtremes extremes) {
  if (!(t > 0.0)) throw DimensionError("lambda_star: t must be positive");
  const BoundEvaluator eval(v, frame, prior, extremes);
  const double f = eval.denominator(t);
  if (!(f > 0.0)) throw DegenerateBoundError("lambda_star: F(t, v) <= 0");
  return eval.numerator(t) / f;
}

double lambda_objective(double lambda, double t, const Weights& v, const AnalysisFrame& frame,
                        const ChannelPrior& prior, PairExtremes extremes) {
  const BoundEvaluator eval(v, frame, prior, extremes);
  return frame.n() - 2.0 * lambda * eval.numerator(t) + lambda * lambda * eval.denominator(t);
}

}  // namespace angsparse
