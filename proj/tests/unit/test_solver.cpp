#include <doctest.h>

#include <cmath>

#include "../oracles/lp_oracle.hpp"
#include "angsparse/error.hpp"
#include "angsparse/rng.hpp"
#include "angsparse/solver.hpp"
#include "angsparse/synth.hpp"

using namespace angsparse;

namespace {

AnalysisFrame random_real_frame(int n, int p, Rng& rng) {
  return AnalysisFrame(gaussian_matrix(p, n, Field::real, rng), FrameMode::general, Field::real);
}

Weights random_weights(int p, Rng& rng) {
  RVector v(p);
  for (int k = 0; k < p; ++k) v[k] = 0.5 + 1.5 * uniform01(rng);
  return Weights(v);
}

}  // namespace

TEST_CASE("complex soft thresholding") {
  const Complex x(0.3, 0.4);
  CHECK(soft_threshold(x, 0.5) == Complex(0.0, 0.0));
  CHECK(std::abs(soft_threshold(x, 0.25) - x / 2.0) <= 1e-15);
  CHECK(soft_threshold(x, 0.0) == x);
}

TEST_CASE("weighted analysis objective") {
  const AnalysisFrame f = build_frame(8, 32);
  Rng rng(1);
  const CVector z = gaussian_vector(8, Field::complex, rng);
  CHECK(objective(f, Weights::uniform(32), CVector::Zero(8)) == 0.0);
  CHECK(objective(f, Weights::uniform(32), z) == doctest::Approx(f.analyze(z).cwiseAbs().sum()));
  const Weights v = random_weights(32, rng);
  CHECK(objective(f, v.scaled(2.0), z) == doctest::Approx(2.0 * objective(f, v, z)));
}

TEST_CASE("weights must be positive and finite") {
  CHECK_THROWS_AS(Weights(RVector::Zero(3)), WeightError);
  RVector v = RVector::Ones(3);
  v[1] = -1.0;
  CHECK_THROWS_AS(Weights{v}, WeightError);
  v[1] = std::nan("");
  CHECK_THROWS_AS(Weights{v}, WeightError);
}

TEST_CASE("singleton feasible set") {
  const AnalysisFrame f = build_frame(8, 32);
  Rng rng(2);
  const CVector y = gaussian_vector(8, Field::complex, rng);
  const SolverResult r = solve(CMatrix::Identity(8, 8), y, f, Weights::uniform(32), 0.0);
  CHECK(r.converged);
  CHECK((r.estimate - y).norm() <= 1e-8);
}

TEST_CASE("infeasible data and shape errors") {
  const AnalysisFrame f = build_frame(4, 8);
  Rng rng(3);
  const CMatrix A = gaussian_matrix(6, 4, Field::complex, rng);
  const CVector y = gaussian_vector(6, Field::complex, rng);
  CHECK_THROWS_AS(solve(A, y, f, Weights::uniform(8), 0.0), FeasibilityError);
  CHECK_THROWS_AS(solve(A, y, f, Weights::uniform(7), 10.0), DimensionError);
  CHECK_THROWS_AS(solve(A, CVector::Zero(5), f, Weights::uniform(8), 10.0), DimensionError);
}

TEST_CASE("real noise-free instances match vertex enumeration") {
  Rng rng(4);
  for (int inst = 0; inst < 12; ++inst) {
    const int n = 4 + inst % 5;
    const int p = n + 2 + 2 * (inst % 4);
    const int m = 2 + inst % (n - 2);
    const AnalysisFrame f = random_real_frame(n, p, rng);
    const Weights v = random_weights(p, rng);
    const CMatrix A = gaussian_matrix(m, n, Field::real, rng);
    const CVector y = gaussian_vector(m, Field::real, rng);
    const SolverResult r = solve(A, y, f, v, 0.0);
    const double ref = oracle::vertex_enumeration(A.real(), y.real(), f.omega().real(), v.values());
    REQUIRE(r.converged);
    CHECK(r.residual <= 1e-8);
    CHECK(std::abs(r.objective - ref) <= 1e-5);
  }
}

TEST_CASE("noisy and complex instances match the barrier reference") {
  Rng rng(5);
  for (int inst = 0; inst < 10; ++inst) {
    const bool real = inst % 2 == 0;
    const int n = real ? 6 : 4 + inst % 3;
    const int p = real ? 12 : 2 * n;
    const int m = n - 2;
    const AnalysisFrame f = real ? real_frame(n, p) : build_frame(n, p);
    const Weights v = random_weights(p, rng);
    const Field field = real ? Field::real : Field::complex;
    const CMatrix A = gaussian_matrix(m, n, field, rng);
    const CVector h = uniform_sphere(n, field, rng);
    const double eta = inst < 4 ? 0.0 : 0.05 * (inst - 3);
    const CVector y = A * h + (eta > 0 ? CVector(uniform_sphere(m, field, rng) * (0.5 * eta)) : CVector::Zero(m));
    const SolverResult r = solve(A, y, f, v, eta);
    const oracle::BarrierResult ref = oracle::barrier_solve(A, y, f.omega(), v.values(), eta, real);
    REQUIRE(ref.ok);
    REQUIRE(r.converged);
    CHECK(r.residual <= eta + 1e-8);
    CHECK(std::abs(r.objective - ref.objective) <= 1e-5);
  }
}

TEST_CASE("recovery at the default size above the transition") {
  // m = 36 sits above the empirical transition (~30 complex pilots) of this
  // ensemble, located by a coarse sweep.
  const AnalysisFrame f = build_frame(32, 128);
  RVector beta = RVector::Constant(128, 0.02);
  beta.segment(29, 19).setConstant(0.9);
  beta.segment(74, 19).setConstant(0.9);
  int ok = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(derive_seed(99, {t}));
    const ChannelRealization ch = synth_channel(f, sample_cosupport(beta, 24, 32, rng), rng);
    const PilotSetup setup = gen_pilots(36, 32, Field::complex, derive_seed(99, {t, 1}));
    const SolverResult r = solve(setup.A, setup.A * ch.h, f, Weights::uniform(128), 0.0);
    CHECK(r.residual <= 1e-8 + 1e-12);
    ok += r.converged && (r.estimate - ch.h).norm() <= 1e-4;
  }
  CHECK(ok >= 95);
}

TEST_CASE("optimality witness, scale invariance and noise stability") {
  const AnalysisFrame f = build_frame(16, 64);
  Rng rng(6);
  const std::vector<int> cos = {3, 10, 20, 33, 40, 51, 60};
  const ChannelRealization ch = synth_channel(f, cos, rng);
  const Weights v = random_weights(64, rng);
  const PilotSetup setup = gen_pilots(12, 16, Field::complex, 7);

  const SolverResult base = solve(setup.A, setup.A * ch.h, f, v, 0.0);
  REQUIRE(base.converged);
  CHECK(base.objective <= objective(f, v, ch.h) + 1e-8);
  const SolverResult scaled = solve(setup.A, setup.A * ch.h, f, v.scaled(10.0), 0.0);
  REQUIRE(scaled.converged);
  CHECK((base.estimate - scaled.estimate).norm() <= 1e-6);

  double prev = -1.0;
  for (double eta : {0.0, 0.01, 0.1}) {
    double err = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Measurement meas = measure(setup, ch.h, eta, s);
      const SolverResult r = solve(setup.A, meas.y, f, v, eta);
      REQUIRE(r.converged);
      CHECK(r.residual <= eta + 1e-8);
      CHECK(r.objective <= objective(f, v, ch.h) * (1 + 1e-8) + 1e-8);
      err += (r.estimate - ch.h).norm();
    }
    CHECK(err / 20 >= prev - 1e-9);
    prev = err / 20;
  }
}
