#include <doctest.h>

#include <cmath>
#include <limits>

#include "../oracles/bound_reference.hpp"
#include "../oracles/high_precision.hpp"
#include "angsparse/bound.hpp"
#include "angsparse/error.hpp"
#include "angsparse/rng.hpp"
#include "angsparse/statdim.hpp"
#include "angsparse/synth.hpp"

using namespace angsparse;

namespace {

// Prior with correlated supports and nonzero sign correlations, estimated
// from channels of the frame itself.
ChannelPrior sampled_prior(const AnalysisFrame& f, int ell, std::uint64_t seed) {
  std::vector<CVector> samples;
  RVector beta = RVector::Constant(f.p(), 0.3);
  beta.head(f.p() / 4).setConstant(0.9);
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_seed(seed, {i}));
    samples.push_back(synth_channel(f, sample_cosupport(beta, ell, f.n(), rng), rng).h_a);
  }
  return estimate_prior(samples);
}

RVector random_positive(int p, Rng& rng) {
  RVector v(p);
  for (int k = 0; k < p; ++k) v[k] = std::exp(std::log(0.2) + std::log(25.0) * uniform01(rng));
  return v;
}

}  // namespace

TEST_CASE("q(t) against the 50-digit reference") {
  // Frozen from the 50-digit evaluation of the defining formula.
  CHECK(std::abs(q_func(1.0) - 0.16663094117537259677) <= 1e-12 * 0.1666);
  CHECK(std::abs(q_func(0.5) - 0.79118622960522411837) <= 1e-12 * 0.7912);
  CHECK(std::abs(q_func(5.0) / 2.1384662135331259816e-8 - 1.0) <= 1e-12);
  CHECK(q_func(10.0) < 1e-10);
  for (int i = 0; i < 100; ++i) {
    const double t = std::pow(10.0, -3.0 + 5.0 * i / 99.0);
    const double ref = oracle::q_ref(t);
    CHECK(std::abs(q_func(t) - ref) <= 1e-12 * std::abs(ref));
    CHECK(std::abs(std::erf(t) - oracle::erf_ref(t)) <= 1e-12 * oracle::erf_ref(t));
  }
  for (int i = 0; i <= 200; ++i) CHECK(q_func(std::pow(10.0, -3.0 + 4.0 * i / 200.0)) > 0.0);
  CHECK_THROWS_AS(q_func(0.0), DimensionError);
  CHECK_THROWS_AS(q_func(-1.0), DimensionError);
}

TEST_CASE("F on the identity frame with an independent prior") {
  const int n = 16, s = 3;
  const AnalysisFrame f = identity_frame(n);
  const ChannelPrior pr = independent_symmetric_prior(RVector::Constant(n, double(s) / n));
  for (double t : {0.3, 1.0, 2.5}) {
    const double expected =
        t * t * s + (std::erf(t / std::sqrt(2.0)) - q_func(t) * t * t) * (n - s);
    const double value = bound_denominator(t, Weights::uniform(n), f, pr);
    CHECK(std::abs(value - expected) <= 1e-10);
    CHECK(std::abs(value - oracle::denominator_loop(t, RVector::Ones(n), f.omega(), pr)) <= 1e-10);
  }
}

TEST_CASE("F with every bin active keeps only the sign sum") {
  const AnalysisFrame f = build_frame(8, 32);
  Rng rng(1);
  const RVector v = random_positive(32, rng);
  ChannelPrior pr = independent_symmetric_prior(RVector::Ones(32));
  const double t = 0.7;
  const double sign_sum = t * t * v.dot(f.gram_real().cwiseProduct(pr.sigma) * v);
  CHECK(std::abs(bound_denominator(t, Weights(v), f, pr) - sign_sum) <= 1e-12);
  CHECK(bound_numerator(t, Weights(v), f, pr) == 0.0);
}

TEST_CASE("evaluator matches the naive loops") {
  const AnalysisFrame f = build_frame(8, 32);
  const ChannelPrior pr = sampled_prior(f, 5, 3);
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const RVector v = random_positive(32, rng);
    for (double t : {0.05, 0.8, 3.0}) {
      for (PairExtremes e : {PairExtremes::per_pair, PairExtremes::global}) {
        const BoundEvaluator eval(Weights(v), f, pr, e);
        const double ref = oracle::denominator_loop(t, v, f.omega(), pr, e == PairExtremes::per_pair);
        CHECK(std::abs(eval.denominator(t) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
      }
      const double num = oracle::numerator_loop(t, v, f.omega(), pr);
      CHECK(std::abs(bound_numerator(t, Weights(v), f, pr) - num) <= 1e-10);
    }
  }
  const RVector tied = RVector::Constant(32, 0.9);
  CHECK(std::abs(bound_denominator(1.3, Weights(tied), f, pr) -
                 oracle::denominator_loop(1.3, tied, f.omega(), pr)) <= 1e-10);
}

TEST_CASE("statdim_upper edge cases and ranges") {
  const AnalysisFrame f = build_frame(8, 32);
  const BoundReport full = statdim_upper(Weights::uniform(32), f, independent_symmetric_prior(RVector::Ones(32)));
  CHECK(full.statdim_upper == 8.0);
  CHECK_FALSE(full.valid);

  const ChannelPrior pr = sampled_prior(f, 5, 4);
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const BoundReport r = statdim_upper(Weights(random_positive(32, rng)), f, pr);
    CHECK(r.statdim_upper >= 0.0);
    CHECK(r.statdim_upper <= 8.0);
  }
  TSearch empty;
  empty.hi = empty.lo;
  CHECK_THROWS_AS(statdim_upper(Weights::uniform(32), f, pr, empty), DimensionError);
}

TEST_CASE("statdim_upper depends on t v only") {
  const AnalysisFrame f = build_frame(8, 32);
  const ChannelPrior pr = sampled_prior(f, 5, 5);
  Rng rng(4);
  const RVector v = random_positive(32, rng);
  const BoundReport a = statdim_upper(Weights(v), f, pr);
  TSearch half;
  half.lo /= 2.0;
  half.hi /= 2.0;
  const BoundReport b = statdim_upper(Weights(2.0 * v), f, pr, half);
  CHECK(std::abs(a.statdim_upper - b.statdim_upper) <= 1e-6);
  CHECK(std::abs(a.t_star - 2.0 * b.t_star) <= 1e-4 * a.t_star);
}

TEST_CASE("lambda star") {
  const AnalysisFrame f = build_frame(8, 32);
  const ChannelPrior pr = sampled_prior(f, 5, 6);
  Rng rng(5);
  const Weights v(random_positive(32, rng));
  const BoundReport r = statdim_upper(v, f, pr);
  REQUIRE(r.valid);
  const double lam = lambda_star(r.t_star, v, f, pr);
  CHECK(std::abs(lam - r.lambda_star) <= 1e-12);
  const double at_star = lambda_objective(lam, r.t_star, v, f, pr);
  CHECK(std::abs(at_star - r.statdim_upper) <= 1e-10);
  CHECK(lambda_objective(1.01 * lam, r.t_star, v, f, pr) >= at_star);
  CHECK(lambda_objective(0.99 * lam, r.t_star, v, f, pr) >= at_star);

  const double ref = oracle::numerator_loop(r.t_star, v.values(), f.omega(), pr) /
                     oracle::denominator_loop(r.t_star, v.values(), f.omega(), pr);
  CHECK(std::abs(lam - ref) <= 1e-10);

  const ChannelPrior ones = independent_symmetric_prior(RVector::Ones(32));
  CHECK(lambda_star(1.0, v, f, ones) == 0.0);
  // A tiny minimum weight with global extremes drives F negative.
  const ChannelPrior none = independent_symmetric_prior(RVector::Zero(32));
  RVector spread = RVector::Ones(32);
  spread[0] = 1e-6;
  CHECK_THROWS_AS(lambda_star(1.0, Weights(spread), f, none, PairExtremes::global),
                  DegenerateBoundError);
}

TEST_CASE("error bound") {
  CHECK(error_upper(25.0, 101, 1.0, 0.0).value == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(error_upper(25.0, 101, 0.0, 0.0).value == 0.0);
  const ErrorBound none = error_upper(25.0, 20, 1.0, 0.0);
  CHECK_FALSE(none.finite);
  CHECK(std::isinf(none.value));
  CHECK(error_upper(4.0, 50, 1.0, 1.0).probability == doctest::Approx(1.0 - std::exp(-0.5)));
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 30; m <= 200; m += 10) {
    const ErrorBound e = error_upper(9.0, m, 0.1, 1.0);
    CHECK(e.value < prev);
    prev = e.value;
  }
  CHECK_THROWS_AS(error_upper(1.0, 1, 1.0, 0.0), DimensionError);
  CHECK_THROWS_AS(error_upper(1.0, 10, -1.0, 0.0), DimensionError);
}

TEST_CASE("identity frame bound dominates the empirical dimension") {
  const int n = 64;
  const AnalysisFrame f = identity_frame(n);
  const ChannelPrior pr = independent_symmetric_prior(RVector::Constant(n, 4.0 / n));
  const BoundReport r = statdim_upper(Weights::uniform(n), f, pr);
  REQUIRE(r.valid);
  CHECK(r.statdim_upper > 0.0);
  CHECK(r.statdim_upper < n);
  // Average over 4-sparse channels with random supports and signs.
  std::vector<ChannelRealization> channels;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_seed(8, {i}));
    ChannelRealization ch;
    ch.h = CVector::Zero(n);
    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = k;
    for (int k = 0; k < 4; ++k) {
      std::swap(idx[k], idx[k + static_cast<int>(uniform01(rng) * (n - k))]);
      ch.h[idx[k]] = standard_normal(rng);
    }
    for (int k = 0; k < n; ++k) (ch.h[k] == 0.0 ? ch.cosupport : ch.support).push_back(k);
    channels.push_back(ch);
  }
  const StatDimEstimate est = ensemble_statdim(f, Weights::uniform(n), channels, 9);
  CHECK(r.statdim_upper >= est.mean - 2.0 * est.stderr);
}
