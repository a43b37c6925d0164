#include "angsparse/synth.hpp"

#include <algorithm>
#include <sstream>
#include <type_traits>

#include <Eigen/SVD>

#include "angsparse/error.hpp"

namespace angsparse {

const char* to_string(NoiseModel model) {
  return model == NoiseModel::sphere ? "sphere" : "gaussian";
}

NoiseModel noise_model_from_string(const std::string& name) {
  if (name == "sphere") return NoiseModel::sphere;
  if (name == "gaussian") return NoiseModel::gaussian;
  throw ConfigError("unknown noise model '" + name + "' (expected sphere|gaussian)");
}

std::vector<int> sample_cosupport(const RVector& beta, int ell, int n, Rng& rng) {
  if (ell < 0 || ell >= n) {
    throw DimensionError("sample_cosupport: need 0 <= ell < n, got ell = " +
                         std::to_string(ell) + ", n = " + std::to_string(n));
  }
  const Eigen::Index p = beta.size();
  if (ell > p) throw DimensionError("sample_cosupport: ell exceeds the number of bins");
  std::vector<double> mass(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < p; ++k) mass[k] = std::clamp(1.0 - beta[k], 0.0, 1.0);

  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(ell));
  for (int draw = 0; draw < ell; ++draw) {
    double total = 0.0;
    for (double w : mass) total += w;
    if (!(total > 0.0)) {
      throw SynthesisError("sample_cosupport: no remaining bins with beta < 1 (drew " +
                           std::to_string(draw) + " of " + std::to_string(ell) + ")");
    }
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    int pick = -1;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (mass[k] <= 0.0) continue;
      acc += mass[k];
      pick = static_cast<int>(k);
      if (target < acc) break;
    }
    chosen.push_back(pick);
    mass[pick] = 0.0;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

ChannelRealization synth_channel(const AnalysisFrame& frame,
                                 const std::vector<int>& cosupport, Rng& rng) {
  const int n = frame.n();
  const int p = frame.p();
  if (static_cast<int>(cosupport.size()) >= n) {
    throw SynthesisError("synth_channel: |cosupport| = " + std::to_string(cosupport.size()) +
                         " must be < n = " + std::to_string(n));
  }
  std::vector<char> in_cosupport(static_cast<std::size_t>(p), 0);
  for (int k : cosupport) {
    if (k < 0 || k >= p || in_cosupport[k]) {
      throw DimensionError("synth_channel: cosupport indices must be distinct bins");
    }
    in_cosupport[k] = 1;
  }

  CMatrix basis;
  if (cosupport.empty()) {
    basis = CMatrix::Identity(n, n);
  } else {
    const auto null_basis = [&](const auto& rows) {
      using Matrix = std::decay_t<decltype(rows)>;
      Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
      const RVector& sv = svd.singularValues();
      const double cutoff = kNullSpaceRelTol * sv[0];
      int rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv[i] > cutoff ? 1 : 0;
      if (rank >= n) {
        std::ostringstream msg;
        msg << "synth_channel: trivial null space for cosupport {";
        for (std::size_t i = 0; i < cosupport.size(); ++i) msg << (i ? "," : "") << cosupport[i];
        msg << "}";
        throw SynthesisError(msg.str());
      }
      return CMatrix(svd.matrixV().rightCols(n - rank).template cast<Complex>());
    };
    CMatrix rows(static_cast<Eigen::Index>(cosupport.size()), n);
    for (std::size_t r = 0; r < cosupport.size(); ++r) rows.row(r) = frame.omega().row(cosupport[r]);
    basis = frame.field() == Field::real ? null_basis(RMatrix(rows.real())) : null_basis(rows);
  }

  const CVector c = uniform_sphere(basis.cols(), frame.field(), rng);
  ChannelRealization out;
  out.h = basis * c;
  out.h /= out.h.norm();
  out.h_a = frame.analyze(out.h);
  out.cosupport = cosupport;
  std::sort(out.cosupport.begin(), out.cosupport.end());
  for (int k = 0; k < p; ++k) {
    if (!in_cosupport[k]) out.support.push_back(k);
  }
  return out;
}

PilotSetup gen_pilots(int m, int n, Field field, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimensionError("gen_pilots: need m >= 1 and n >= 1");
  Rng rng(seed);
  PilotSetup setup;
  setup.A = gaussian_matrix(m, n, field, rng);
  setup.m = m;
  setup.field = field;
  setup.pilot_seed = seed;
  return setup;
}

Measurement measure(const PilotSetup& setup, const CVector& h, double eta,
                    std::uint64_t seed, NoiseModel model) {
  if (h.size() != setup.A.cols()) {
    throw DimensionError("measure: channel length " + std::to_string(h.size()) +
                         " does not match pilot matrix with " +
                         std::to_string(setup.A.cols()) + " columns");
  }
  if (!(eta >= 0.0)) throw DimensionError("measure: eta must be >= 0");
  Measurement out;
  out.noise_seed = seed;
  out.noise = CVector::Zero(setup.A.rows());
  if (eta > 0.0) {
    Rng rng(seed);
    if (model == NoiseModel::sphere) {
      out.noise = eta * uniform_sphere(setup.A.rows(), setup.field, rng);
    } else {
      const double scale = eta / std::sqrt(static_cast<double>(setup.A.rows()));
      out.noise = scale * gaussian_vector(setup.A.rows(), setup.field, rng);
    }
  }
  out.y = setup.A * h + out.noise;
  out.eta = model == NoiseModel::sphere ? eta : out.noise.norm();
  return out;
}

}  // namespace angsparse
