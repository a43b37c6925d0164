#include "angsparse/priors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "angsparse/error.hpp"

namespace angsparse {

void ChannelPrior::validate(double slack) const {
  const Eigen::Index p = beta.size();
  if (beta_joint.rows() != p || beta_joint.cols() != p || sigma.rows() != p ||
      sigma.cols() != p) {
    throw PriorError("prior arrays must be p, p x p, p x p with p = " + std::to_string(p));
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(beta[i] >= -slack && beta[i] <= 1.0 + slack)) {
      throw PriorError("beta[" + std::to_string(i) + "] = " + std::to_string(beta[i]) +
                       " outside [0, 1]");
    }
    if (std::abs(beta_joint(i, i) - beta[i]) > slack) {
      throw PriorError("beta_joint diagonal differs from beta at bin " + std::to_string(i));
    }
    if (std::abs(sigma(i, i) - beta[i]) > slack) {
      throw PriorError("sigma diagonal differs from beta at bin " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      const double bij = beta_joint(i, j);
      if (std::abs(bij - beta_joint(j, i)) > slack) {
        throw PriorError("beta_joint is not symmetric");
      }
      if (std::abs(sigma(i, j) - sigma(j, i)) > slack) {
        throw PriorError("sigma is not symmetric");
      }
      const double lower = std::max(0.0, beta[i] + beta[j] - 1.0);
      const double upper = std::min(beta[i], beta[j]);
      if (bij < lower - slack || bij > upper + slack) {
        throw PriorError("beta_joint(" + std::to_string(i) + "," + std::to_string(j) +
                         ") violates the Frechet bounds");
      }
      if (std::abs(sigma(i, j)) > bij + slack) {
        throw PriorError("|sigma(" + std::to_string(i) + "," + std::to_string(j) +
                         ")| exceeds beta_joint");
      }
    }
  }
}

ChannelPrior make_prior(RVector beta, RMatrix beta_joint, RMatrix sigma) {
  ChannelPrior prior{std::move(beta), std::move(beta_joint), std::move(sigma)};
  prior.validate();
  return prior;
}

ChannelPrior independent_symmetric_prior(const RVector& beta) {
  const Eigen::Index p = beta.size();
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(beta[k] >= 0.0 && beta[k] <= 1.0)) {
      throw PriorError("beta[" + std::to_string(k) + "] = " + std::to_string(beta[k]) +
                       " outside [0, 1]");
    }
  }
  ChannelPrior prior;
  prior.beta = beta;
  prior.beta_joint = beta * beta.transpose();
  prior.beta_joint.diagonal() = beta;
  prior.sigma = beta.asDiagonal();
  return prior;
}

ChannelPrior independent_symmetric_prior(std::span<const double> beta) {
  return independent_symmetric_prior(
      RVector(Eigen::Map<const RVector>(beta.data(), static_cast<Eigen::Index>(beta.size()))));
}

ChannelPrior estimate_prior(std::span<const CVector> samples, double zero_tol) {
  if (samples.empty()) throw PriorError("estimate_prior: empty sample list");
  if (!(zero_tol > 0.0)) throw PriorError("estimate_prior: zero_tol must be positive");
  const Eigen::Index p = samples.front().size();

  // Accumulate indicator and sign outer products; the sums are exact in the
  // indicator part, so the result does not depend on sample order beyond
  // floating-point rounding of sigma.
  RMatrix support_counts = RMatrix::Zero(p, p);
  CMatrix sign_sum = CMatrix::Zero(p, p);
  RVector indicator(p);
  CVector signs(p);
  for (const auto& h_a : samples) {
    if (h_a.size() != p) throw DimensionError("estimate_prior: samples differ in length");
    const double threshold = zero_tol * h_a.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < p; ++k) {
      const double mag = std::abs(h_a[k]);
      const bool active = mag > threshold && mag > 0.0;
      indicator[k] = active ? 1.0 : 0.0;
      signs[k] = active ? h_a[k] / mag : Complex(0.0, 0.0);
    }
    support_counts.noalias() += indicator * indicator.transpose();
    sign_sum.noalias() += signs * signs.adjoint();
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  ChannelPrior prior;
  prior.beta_joint = support_counts * inv;
  prior.beta = prior.beta_joint.diagonal();
  prior.sigma = sign_sum.real() * inv;
  // |sgn|^2 = 1 on the support, so the diagonal is the support frequency.
  prior.sigma.diagonal() = prior.beta;
  prior.sigma = 0.5 * (prior.sigma + prior.sigma.transpose()).eval();
  prior.validate(1e-9);
  return prior;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& path, int line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return value;
  } catch (const std::exception&) {
  }
  throw PriorError(path + ":" + std::to_string(line_no) + ": not a number: '" + text + "'");
}

}  // namespace

std::vector<double> read_beta_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PriorError("cannot open prior file " + path);
  std::string line;
  std::vector<std::pair<long, double>> entries;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw PriorError(path + ":" + std::to_string(line_no) + ": expected 2 columns");
    }
    if (line_no == 1 && trim(fields[0]) == "bin_index") continue;
    const double index = parse_double(fields[0], path, line_no);
    entries.emplace_back(std::lround(index), parse_double(fields[1], path, line_no));
  }
  std::vector<double> beta(entries.size(), -1.0);
  for (const auto& [index, value] : entries) {
    if (index < 0 || index >= static_cast<long>(beta.size()) || beta[index] >= 0.0) {
      throw PriorError(path + ": bin indices must be a permutation of 0..p-1");
    }
    if (!(value >= 0.0 && value <= 1.0)) throw PriorError(path + ": beta outside [0, 1]");
    beta[index] = value;
  }
  if (beta.empty()) throw PriorError(path + ": no bins");
  return beta;
}

void write_beta_csv(const std::string& path, std::span<const double> beta) {
  std::ofstream out(path);
  if (!out) throw PriorError("cannot write " + path);
  out.precision(17);
  out << "bin_index,beta\n";
  for (std::size_t k = 0; k < beta.size(); ++k) out << k << ',' << beta[k] << '\n';
}

ChannelPrior read_prior_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PriorError("cannot open prior file " + path);
  std::string line;
  int line_no = 0;
  struct Row {
    long i, j;
    double joint, sigma;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw PriorError(path + ":" + std::to_string(line_no) + ": expected 4 columns");
    }
    if (trim(fields[0]) == "i") continue;
    rows.push_back({std::lround(parse_double(fields[0], path, line_no)),
                    std::lround(parse_double(fields[1], path, line_no)),
                    parse_double(fields[2], path, line_no),
                    parse_double(fields[3], path, line_no)});
  }
  const auto p = static_cast<long>(std::lround(std::sqrt(static_cast<double>(rows.size()))));
  if (p == 0 || p * p != static_cast<long>(rows.size())) {
    throw PriorError(path + ": expected p*p rows, got " + std::to_string(rows.size()));
  }
  RMatrix joint = RMatrix::Constant(p, p, std::nan(""));
  RMatrix sigma = RMatrix::Zero(p, p);
  for (const auto& r : rows) {
    if (r.i < 0 || r.i >= p || r.j < 0 || r.j >= p || !std::isnan(joint(r.i, r.j))) {
      throw PriorError(path + ": pair indices must cover each (i, j) exactly once");
    }
    joint(r.i, r.j) = r.joint;
    sigma(r.i, r.j) = r.sigma;
  }
  RVector beta = joint.diagonal();
  return make_prior(std::move(beta), std::move(joint), std::move(sigma));
}

void write_prior_csv(const std::string& path, const ChannelPrior& prior) {
  std::ofstream out(path);
  if (!out) throw PriorError("cannot write " + path);
  out.precision(17);
  out << "i,j,beta_joint,sigma\n";
  for (int i = 0; i < prior.p(); ++i) {
    for (int j = 0; j < prior.p(); ++j) {
      out << i << ',' << j << ',' << prior.beta_joint(i, j) << ',' << prior.sigma(i, j) << '\n';
    }
  }
}

}  // namespace angsparse
