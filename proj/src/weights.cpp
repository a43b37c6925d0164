#include "angsparse/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "angsparse/error.hpp"
#include "angsparse/parallel.hpp"
#include "angsparse/rng.hpp"

namespace angsparse {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Absorbed objective with cached per-bin terms, so that moving one weight
// costs O(p). Only valid for per-pair extremes.
class AbsorbedObjective {
 public:
  AbsorbedObjective(const AnalysisFrame& frame, const ChannelPrior& prior)
      : n_(frame.n()),
        coeff_((1.0 - prior.beta.array()) * frame.row_norms().array()),
        sign_(frame.gram_real().cwiseProduct(prior.sigma)),
        cross_(frame.coherence()) {
    const Eigen::Index p = frame.p();
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < p; ++i) {
        cross_(i, j) *= 1.0 - prior.beta[i] - prior.beta[j] + prior.beta_joint(i, j);
      }
    }
    cross_ = 0.5 * (cross_ + cross_.transpose()).eval();
  }

  void set(const RVector& v) {
    v_ = v;
    const Eigen::Index p = v.size();
    erf_.resize(p);
    q_.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      erf_[k] = std::erf(v[k] * kInvSqrt2);
      q_[k] = q_func(v[k]);
    }
    sign_v_ = sign_ * v;
    num_ = coeff_.dot(erf_);
    den_ = v.dot(sign_v_);
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < p; ++i) den_ += cross_(i, j) * pair(i, v[i], j, v[j]);
    }
  }

  double value() const { return finish(num_, den_); }

  // Objective with v_k replaced by w, everything else fixed.
  double moved(Eigen::Index k, double w) const {
    const double erf_w = std::erf(w * kInvSqrt2);
    const double q_w = q_func(w);
    const double delta = w - v_[k];
    const double num = num_ + coeff_[k] * (erf_w - erf_[k]);
    double den = den_ + 2.0 * delta * sign_v_[k] + delta * delta * sign_(k, k);
    double change = 0.0;
    for (Eigen::Index j = 0; j < v_.size(); ++j) {
      if (j == k) continue;
      const double vj = v_[j];
      const double after = w <= vj ? erf_w - q_[j] * w * vj : erf_[j] - q_w * w * vj;
      change += cross_(k, j) * (after - pair(k, v_[k], j, vj));
    }
    den += 2.0 * change;
    den += cross_(k, k) * ((erf_w - q_w * w * w) - (erf_[k] - q_[k] * v_[k] * v_[k]));
    return finish(num, den);
  }

 private:
  double pair(Eigen::Index i, double vi, Eigen::Index j, double vj) const {
    return vi <= vj ? erf_[i] - q_[j] * vi * vj : erf_[j] - q_[i] * vi * vj;
  }
  double finish(double num, double den) const {
    if (!(den > 0.0)) return kInf;
    return n_ - num * num / den;
  }

  int n_;
  RVector coeff_;
  RMatrix sign_;
  RMatrix cross_;
  RVector v_, erf_, q_, sign_v_;
  double num_ = 0.0;
  double den_ = 0.0;
};

struct Descent {
  RVector v;
  double initial = 0.0;
  double final = 0.0;
  int iterations = 0;
};

Descent descend(const AnalysisFrame& frame, const ChannelPrior& prior, RVector v,
                const WeightOptions& opts) {
  const Eigen::Index p = v.size();
  const bool per_pair = opts.search.extremes == PairExtremes::per_pair;
  std::optional<AbsorbedObjective> cached;
  if (per_pair) cached.emplace(frame, prior);

  auto evaluate = [&](const RVector& w) {
    if (per_pair) {
      cached->set(w);
      return cached->value();
    }
    return absorbed_statdim(Weights(w), frame, prior, opts.search.extremes);
  };

  const double log_floor = std::log(opts.v_floor);
  v = v.cwiseMax(opts.v_floor);
  double f = evaluate(v);
  Descent out;
  out.initial = f;
  double step = opts.step;
  int stalls = 0;
  RVector grad(p);
  int it = 0;
  for (; it < opts.max_iter && std::isfinite(f); ++it) {
    // d f / d log v_k by central differences in v_k.
    if (per_pair) cached->set(v);
    for (Eigen::Index k = 0; k < p; ++k) {
      const double h = opts.fd_rel_step * v[k];
      double up, down;
      if (per_pair) {
        up = cached->moved(k, v[k] + h);
        down = cached->moved(k, v[k] - h);
      } else {
        RVector w = v;
        w[k] = v[k] + h;
        up = evaluate(w);
        w[k] = v[k] - h;
        down = evaluate(w);
      }
      grad[k] = std::isfinite(up) && std::isfinite(down) ? v[k] * (up - down) / (2.0 * h) : 0.0;
    }

    const RVector x = v.array().log().matrix();
    bool accepted = false;
    RVector candidate;
    double f_candidate = f;
    for (int halving = 0; halving < 60; ++halving) {
      const RVector x_new = (x - step * grad).cwiseMax(log_floor);
      const double decrease = grad.dot(x - x_new);
      if (!(decrease > 0.0)) break;
      candidate = x_new.array().exp().matrix().cwiseMax(opts.v_floor);
      f_candidate = evaluate(candidate);
      if (f_candidate <= f - 1e-4 * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double gain = f - f_candidate;
    v = candidate;
    f = f_candidate;
    step = std::min(step * 2.0, 1e3);
    stalls = gain < opts.tol * std::max(1.0, std::abs(f)) ? stalls + 1 : 0;
    if (stalls >= 3) {
      ++it;
      break;
    }
  }
  out.v = v;
  out.final = f;
  out.iterations = it;
  return out;
}

}  // namespace

double f1(const Weights& v, const AnalysisFrame& frame, const ChannelPrior& prior,
          PairExtremes extremes) {
  return BoundEvaluator(v, frame, prior, extremes).denominator(1.0);
}

double absorbed_statdim(const Weights& v, const AnalysisFrame& frame, const ChannelPrior& prior,
                        PairExtremes extremes) {
  return BoundEvaluator(v, frame, prior, extremes).infimand(1.0);
}

Weights heuristic_weights(const RVector& beta, double eps) {
  if (!(eps > 0.0)) throw WeightError("heuristic weights: eps must be positive");
  const RVector v = (beta.array() + eps).inverse().matrix();
  return Weights(v / v.mean());
}

WeightResult optimize_weights(const AnalysisFrame& frame, const ChannelPrior& prior,
                              const WeightOptions& opts) {
  const int p = frame.p();
  if (prior.p() != p) throw DimensionError("optimize_weights: prior and frame disagree on p");
  if (!(opts.v_floor > 0.0)) throw WeightError("optimize_weights: v_floor must be positive");

  std::vector<std::pair<std::string, RVector>> shapes;
  shapes.emplace_back("uniform", RVector::Ones(p));
  shapes.emplace_back("heuristic", heuristic_weights(prior.beta, opts.heuristic_eps).values());
  for (int r = 0; r < opts.random_starts; ++r) {
    Rng rng(derive_seed(opts.seed, {static_cast<std::uint64_t>(r)}));
    RVector v(p);
    for (int k = 0; k < p; ++k) v[k] = std::exp(std::log(0.1) + std::log(100.0) * uniform01(rng));
    shapes.emplace_back("random" + std::to_string(r), std::move(v));
  }

  std::vector<std::optional<Descent>> runs(shapes.size());
  parallel_for(shapes.size(), opts.threads, [&](std::size_t i) {
    const BoundReport start = statdim_upper(Weights(shapes[i].second), frame, prior, opts.search);
    if (!start.valid) return;
    runs[i] = descend(frame, prior, shapes[i].second * start.t_star, opts);
  });

  WeightResult result{Weights::uniform(p), {}, {}};
  int best = -1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i]) continue;
    result.starts.push_back({shapes[i].first, runs[i]->initial, runs[i]->final, runs[i]->iterations});
    // Later starts must win by a clear margin, so ties keep the simpler start.
    if (best < 0 ||
        runs[i]->final < runs[best]->final - 1e-9 * std::max(1.0, std::abs(runs[best]->final))) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    throw DegenerateBoundError(
        "optimize_weights: the bound is degenerate (equal to n) for every start; the prior "
        "leaves nothing to exploit");
  }
  result.weights = Weights(runs[best]->v);
  result.report = statdim_upper(result.weights, frame, prior, opts.search);
  return result;
}

}  // namespace angsparse
