#include "angsparse/statdim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/SVD>

#include "angsparse/error.hpp"
#include "angsparse/parallel.hpp"
#include "angsparse/rng.hpp"

namespace angsparse {

void project_box_cone(double& t, CVector& u) {
  const Eigen::Index len = u.size();
  if (len == 0) {
    t = std::max(t, 0.0);
    return;
  }
  const RVector mags = u.cwiseAbs();
  if (t >= 0.0 && mags.maxCoeff() <= t) return;

  std::vector<double> a(mags.data(), mags.data() + len);
  std::sort(a.begin(), a.end(), std::greater<>());
  // With the j largest entries clipped, stationarity of
  // (s - t)^2 + sum_k (a_k - s)_+^2 gives s = (t + a_1 + ... + a_j) / (1 + j).
  double cum = 0.0;
  double s = 0.0;
  bool found = false;
  for (Eigen::Index j = 0; j < len; ++j) {
    cum += a[j];
    const double cand = (t + cum) / static_cast<double>(j + 2);
    const double next = j + 1 < len ? a[j + 1] : 0.0;
    if (cand >= next && cand <= a[j]) {
      s = cand;
      found = true;
      break;
    }
  }
  if (!found || s <= 0.0) {
    // The unconstrained root is negative: the projection is the apex.
    t = 0.0;
    u.setZero();
    return;
  }
  t = s;
  for (Eigen::Index k = 0; k < len; ++k) {
    if (mags[k] > s) u[k] *= s / mags[k];
  }
}

ConeDistance cone_distance(const CVector& g, const CVector& b, const CMatrix& M,
                           const ConeSolveOptions& opts) {
  const Eigen::Index n = g.size();
  if (b.size() != n || M.rows() != n) throw DimensionError("cone_distance: shape mismatch");
  const Eigen::Index cols = M.cols();

  ConeDistance out;
  out.u = CVector::Zero(cols);

  CMatrix X(n, cols + 1);
  X.col(0) = b;
  X.rightCols(cols) = M;
  const double smax = Eigen::JacobiSVD<CMatrix>(X).singularValues()(0);
  if (!(smax > 0.0)) {
    out.dist2 = g.squaredNorm();
    out.converged = true;
    return out;
  }
  const double step = 0.5 / (smax * smax);

  auto value = [&](double t, const CVector& u) { return (g - t * b - M * u).squaredNorm(); };

  double t = 0.0;
  CVector u = CVector::Zero(cols);
  double t_prev = t;
  CVector u_prev = u;
  double f = g.squaredNorm();
  double theta = 1.0;
  double momentum = 0.0;

  CVector r(n);
  CVector next_u(cols);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double yt = t + momentum * (t - t_prev);
    const CVector yu = u + momentum * (u - u_prev);
    r = g - yt * b - M * yu;
    double next_t = yt + 2.0 * step * b.dot(r).real();
    next_u = yu + 2.0 * step * (M.adjoint() * r);
    project_box_cone(next_t, next_u);

    const double f_next = value(next_t, next_u);
    if (f_next > f && momentum > 0.0) {
      // Function-value restart: drop the momentum and retry from (t, u).
      theta = 1.0;
      momentum = 0.0;
      continue;
    }
    const double mapping =
        std::sqrt((yt - next_t) * (yt - next_t) + (yu - next_u).squaredNorm()) / step;
    t_prev = t;
    u_prev = u;
    t = next_t;
    u = next_u;
    f = std::min(f_next, f);
    if (mapping <= opts.tol) {
      out.converged = true;
      ++it;
      break;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    momentum = (theta - 1.0) / theta_next;
    theta = theta_next;
  }
  out.t = t;
  out.u = u;
  out.dist2 = value(t, u);
  out.iterations = it;
  return out;
}

DescentConeProblem::DescentConeProblem(const AnalysisFrame& frame, const Weights& v,
                                       const std::vector<int>& cosupport, const CVector& h) {
  init(frame, v, cosupport, h);
}

DescentConeProblem::DescentConeProblem(const AnalysisFrame& frame, const Weights& v,
                                       const CVector& h, double zero_tol) {
  if (h.size() != frame.n()) throw DimensionError("statdim: h length differs from n");
  const RVector mags = frame.analyze(h).cwiseAbs();
  const double threshold = zero_tol * mags.maxCoeff();
  std::vector<int> cosupport;
  for (Eigen::Index k = 0; k < mags.size(); ++k) {
    if (mags[k] <= threshold) cosupport.push_back(static_cast<int>(k));
  }
  init(frame, v, cosupport, h);
}

void DescentConeProblem::init(const AnalysisFrame& frame, const Weights& v,
                              const std::vector<int>& cosupport, const CVector& h) {
  if (h.size() != frame.n()) throw DimensionError("statdim: h length differs from n");
  if (v.size() != frame.p()) throw DimensionError("statdim: weight length differs from p");
  field_ = frame.field();
  const CMatrix& omega = frame.omega();
  const Eigen::Index p = frame.p();

  std::vector<char> on_cosupport(static_cast<std::size_t>(p), 0);
  for (int k : cosupport) {
    if (k < 0 || k >= p) throw DimensionError("statdim: cosupport index out of range");
    on_cosupport[static_cast<std::size_t>(k)] = 1;
  }

  const CVector analyzed = omega * h;
  CVector signs = CVector::Zero(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    if (on_cosupport[static_cast<std::size_t>(k)]) continue;
    const double mag = std::abs(analyzed[k]);
    if (mag == 0.0) throw DimensionError("statdim: Omega h vanishes off the cosupport");
    signs[k] = v[k] * analyzed[k] / mag;
  }
  b_ = omega.adjoint() * signs;

  M_.resize(frame.n(), static_cast<Eigen::Index>(cosupport.size()));
  for (std::size_t j = 0; j < cosupport.size(); ++j) {
    const int k = cosupport[j];
    M_.col(static_cast<Eigen::Index>(j)) = omega.row(k).adjoint() * v[k];
  }
}

int DescentConeProblem::ambient_dim() const {
  const int n = static_cast<int>(b_.size());
  return field_ == Field::real ? n : 2 * n;
}

ConeDistance DescentConeProblem::distance(const CVector& g, const ConeSolveOptions& opts) const {
  return cone_distance(g, b_, M_, opts);
}

CVector draw_statdim_gaussian(Field field, int n, Rng& rng) {
  return gaussian_vector(n, field, rng, /*per_component_unit=*/true);
}

namespace {

StatDimEstimate summarize(const std::vector<double>& dist2, const std::vector<char>& ok,
                          int ambient, bool keep) {
  StatDimEstimate est;
  est.n_mc = static_cast<int>(dist2.size());
  est.ambient_dim = ambient;
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < dist2.size(); ++i) {
    if (!ok[i]) continue;
    sum += dist2[i];
    ++count;
  }
  est.n_failed = est.n_mc - count;
  if (count > 0) est.mean = sum / count;
  if (count > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < dist2.size(); ++i) {
      if (ok[i]) ss += (dist2[i] - est.mean) * (dist2[i] - est.mean);
    }
    est.stderr = std::sqrt(ss / (count - 1) / count);
  }
  if (keep) {
    est.samples.resize(dist2.size());
    for (std::size_t i = 0; i < dist2.size(); ++i) {
      est.samples[i] = ok[i] ? dist2[i] : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return est;
}

}  // namespace

namespace {

StatDimEstimate estimate_fixed(const DescentConeProblem& problem, int n, int n_mc,
                               std::uint64_t seed, const StatDimOptions& opts) {
  if (n_mc < 1) throw DimensionError("empirical_statdim: n_mc must be >= 1");
  std::vector<double> dist2(static_cast<std::size_t>(n_mc));
  std::vector<char> ok(static_cast<std::size_t>(n_mc));
  parallel_for(dist2.size(), opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, {i}));
    const CVector g = draw_statdim_gaussian(problem.field(), n, rng);
    const ConeDistance d = problem.distance(g, opts.inner);
    dist2[i] = d.dist2;
    ok[i] = d.converged;
  });
  return summarize(dist2, ok, problem.ambient_dim(), opts.keep_samples);
}

}  // namespace

StatDimEstimate empirical_statdim(const AnalysisFrame& frame, const Weights& v,
                                  const ChannelRealization& channel, int n_mc,
                                  std::uint64_t seed, const StatDimOptions& opts) {
  return estimate_fixed(DescentConeProblem(frame, v, channel.cosupport, channel.h), frame.n(),
                        n_mc, seed, opts);
}

StatDimEstimate empirical_statdim(const AnalysisFrame& frame, const Weights& v, const CVector& h,
                                  int n_mc, std::uint64_t seed, const StatDimOptions& opts) {
  return estimate_fixed(DescentConeProblem(frame, v, h), frame.n(), n_mc, seed, opts);
}

StatDimEstimate ensemble_statdim(const AnalysisFrame& frame, const Weights& v,
                                 const std::vector<ChannelRealization>& channels,
                                 std::uint64_t seed, const StatDimOptions& opts) {
  if (channels.empty()) throw DimensionError("ensemble_statdim: no channels");
  std::vector<double> dist2(channels.size());
  std::vector<char> ok(channels.size());
  parallel_for(channels.size(), opts.threads, [&](std::size_t i) {
    const DescentConeProblem problem(frame, v, channels[i].cosupport, channels[i].h);
    Rng rng(derive_seed(seed, {i}));
    const CVector g = draw_statdim_gaussian(problem.field(), frame.n(), rng);
    const ConeDistance d = problem.distance(g, opts.inner);
    dist2[i] = d.dist2;
    ok[i] = d.converged;
  });
  const int ambient = frame.field() == Field::real ? frame.n() : 2 * frame.n();
  return summarize(dist2, ok, ambient, opts.keep_samples);
}

}  // namespace angsparse
