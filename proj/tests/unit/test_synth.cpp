#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "angsparse/error.hpp"
#include "angsparse/synth.hpp"

using namespace angsparse;

TEST_CASE("cosupport sampling") {
  Rng rng(1);
  CHECK(sample_cosupport(RVector::Constant(16, 0.5), 0, 8, rng).empty());

  RVector beta = RVector::Zero(16);
  beta[0] = beta[1] = 1.0;
  for (int i = 0; i < 200; ++i) {
    const auto cos = sample_cosupport(beta, 2, 8, rng);
    REQUIRE(cos.size() == 2);
    CHECK(cos[0] >= 2);
    CHECK(std::is_sorted(cos.begin(), cos.end()));
    CHECK(cos[0] != cos[1]);
  }
  CHECK_THROWS_AS(sample_cosupport(beta, 8, 8, rng), DimensionError);
  CHECK_THROWS_AS(sample_cosupport(RVector::Ones(16), 2, 8, rng), SynthesisError);
}

TEST_CASE("uniform inclusion frequencies") {
  Rng rng(2);
  const int p = 64, ell = 8, draws = 10000;
  std::vector<int> hits(p, 0);
  for (int i = 0; i < draws; ++i) {
    for (int k : sample_cosupport(RVector::Constant(p, 0.4), ell, 16, rng)) ++hits[k];
  }
  const double rate = double(ell) / p;
  const double se = std::sqrt(rate * (1 - rate) / draws);
  for (int k = 0; k < p; ++k) CHECK(std::abs(hits[k] / double(draws) - rate) <= 3.5 * se);
}

TEST_CASE("synthesized channels have the requested cosupport") {
  const AnalysisFrame f = build_frame(8, 32);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto cos = sample_cosupport(RVector::Constant(32, 0.5), 5, 8, rng);
    const ChannelRealization ch = synth_channel(f, cos, rng);
    CHECK(std::abs(ch.h.norm() - 1.0) <= 1e-12);
    CHECK((ch.h_a - f.analyze(ch.h)).norm() <= 1e-12);
    for (int k : ch.cosupport) CHECK(std::abs(ch.h_a[k]) <= 1e-9);
    CHECK(ch.support.size() + ch.cosupport.size() == 32);
  }
}

TEST_CASE("empty cosupport and full-rank cosupport") {
  const AnalysisFrame f = build_frame(8, 32);
  Rng rng(4);
  const ChannelRealization ch = synth_channel(f, {}, rng);
  CHECK(std::abs(ch.h.norm() - 1.0) <= 1e-12);
  CHECK(ch.support.size() == 32);
  CHECK_THROWS_AS(synth_channel(f, {0, 3, 6, 9, 12, 15, 18, 21}, rng), SynthesisError);

  const AnalysisFrame r = real_frame(8, 32);
  const ChannelRealization rc = synth_channel(r, {1, 4, 9}, rng);
  CHECK(rc.h.imag().norm() == 0.0);
  for (int k : rc.cosupport) CHECK(std::abs(rc.h_a[k]) <= 1e-9);
}

TEST_CASE("pilots and measurements") {
  Rng rng(5);
  const CVector h = uniform_sphere(32, Field::complex, rng);
  const PilotSetup a = gen_pilots(40, 32, Field::complex, 77);
  const PilotSetup b = gen_pilots(40, 32, Field::complex, 77);
  CHECK(a.A == b.A);
  CHECK(measure(a, h, 0.0, 3).y == a.A * h);
  for (double eta : {0.01, 0.1, 1.0}) {
    const Measurement m = measure(a, h, eta, 9);
    CHECK(std::abs((m.y - a.A * h).norm() - eta) <= 1e-12);
    CHECK(m.eta == eta);
    const Measurement g = measure(a, h, eta, 9, NoiseModel::gaussian);
    CHECK(std::abs((g.y - a.A * h).norm() - g.eta) <= 1e-12);
  }
  CHECK(measure(a, h, 0.1, 9).y == measure(a, h, 0.1, 9).y);
  CHECK_THROWS_AS(measure(a, CVector::Zero(31), 0.0, 1), DimensionError);

  double energy = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) energy += gen_pilots(40, 32, Field::complex, s).A.squaredNorm();
  CHECK(std::abs(energy / 100 / (40.0 * 32.0) - 1.0) <= 0.05);
  const PilotSetup real = gen_pilots(10, 6, Field::real, 1);
  CHECK(real.A.imag().norm() == 0.0);
}
