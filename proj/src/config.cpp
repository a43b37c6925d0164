#include "angsparse/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "angsparse/error.hpp"

namespace angsparse {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kMethods = {"uniform", "heuristic", "optimal"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::set<std::string> prior_keys(const std::string& profile) {
  if (profile == "two_lobe") {
    return {"profile", "lobe_beta", "floor_beta", "lobe_fraction", "lobe_centers"};
  }
  if (profile == "uniform") return {"profile", "beta"};
  if (profile == "ramp") return {"profile", "low", "high"};
  if (profile == "beta_csv" || profile == "prior_csv") return {"profile", "path"};
  throw ConfigError("prior: unknown profile '" + profile +
                    "' (expected two_lobe|uniform|ramp|beta_csv|prior_csv)");
}

ordered_json prior_to_json(const PriorSpec& s) {
  ordered_json j;
  j["profile"] = s.profile;
  if (s.profile == "two_lobe") {
    j["lobe_beta"] = s.lobe_beta;
    j["floor_beta"] = s.floor_beta;
    j["lobe_fraction"] = s.lobe_fraction;
    j["lobe_centers"] = s.lobe_centers;
  } else if (s.profile == "uniform") {
    j["beta"] = s.beta;
  } else if (s.profile == "ramp") {
    j["low"] = s.low;
    j["high"] = s.high;
  } else {
    j["path"] = s.path;
  }
  return j;
}

PriorSpec prior_from_json(const json& j) {
  PriorSpec s;
  if (!j.is_object()) throw ConfigError("prior: expected a JSON object");
  read(j, "profile", s.profile, "prior");
  reject_unknown(j, prior_keys(s.profile), "prior");
  read(j, "lobe_beta", s.lobe_beta, "prior");
  read(j, "floor_beta", s.floor_beta, "prior");
  read(j, "lobe_fraction", s.lobe_fraction, "prior");
  read(j, "lobe_centers", s.lobe_centers, "prior");
  read(j, "beta", s.beta, "prior");
  read(j, "low", s.low, "prior");
  read(j, "high", s.high, "prior");
  read(j, "path", s.path, "prior");
  return s;
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (c.n < 1) fail("n must be >= 1");
  if (c.p < c.n) fail("p must be >= n");
  if (!(c.d > 0.0)) fail("d must be positive");
  if (c.mode == FrameMode::orthogonal && c.d != 0.5) fail("orthogonal mode requires d = 0.5");
  if (c.field == Field::real) {
    if (c.mode != FrameMode::orthogonal) fail("real field requires orthogonal mode");
    if (c.n % 2 != 0 || c.p % 2 != 0) fail("real field requires even n and p");
  }
  if (c.ell < 0 || c.ell >= c.n) fail("ell must satisfy 0 <= ell < n");
  if (c.m_grid.empty()) fail("m_grid must be nonempty");
  for (std::size_t i = 0; i < c.m_grid.size(); ++i) {
    if (c.m_grid[i] < 2) fail("m_grid entries must be >= 2");
    if (i > 0 && c.m_grid[i] <= c.m_grid[i - 1]) fail("m_grid must be strictly ascending");
  }
  if (c.n_trials < 1) fail("n_trials must be >= 1");
  if (!(c.eta >= 0.0)) fail("eta must be >= 0");
  if (c.methods.empty()) fail("methods must be nonempty");
  std::set<std::string> seen;
  for (const auto& m : c.methods) {
    if (!kMethods.count(m)) fail("unknown method '" + m + "' (expected uniform|heuristic|optimal)");
    if (!seen.insert(m).second) fail("duplicate method '" + m + "'");
  }
  if (c.output_dir.empty()) fail("output_dir must be nonempty");
  if (c.weight_prior != "nominal" && c.weight_prior != "estimated") {
    fail("weight_prior must be nominal|estimated");
  }
  if (c.prior_calibration_samples < 1) fail("prior_calibration_samples must be >= 1");
  if (!(c.heuristic_eps > 0.0)) fail("heuristic_eps must be positive");
  if (!(c.success_tol > 0.0)) fail("success_tol must be positive");
  if (!(c.error_bound_a >= 0.0)) fail("error_bound_a must be >= 0");
  if (c.solver_max_iter < 1) fail("solver.max_iter must be >= 1");
  if (!(c.solver_tol_feas > 0.0) || !(c.solver_tol_opt > 0.0)) fail("solver tolerances must be positive");
  if (!(c.solver_relaxation > 0.0 && c.solver_relaxation < 2.0)) {
    fail("solver.relaxation must lie in (0, 2)");
  }
  if (c.statdim_n_mc < 2) fail("statdim.n_mc must be >= 2");
  if (c.statdim_max_iter < 1 || !(c.statdim_tol > 0.0)) fail("statdim inner options invalid");
  if (c.weights_random_starts < 0 || c.weights_max_iter < 0) fail("weights options must be >= 0");
  if (!(c.weights_v_floor > 0.0)) fail("weights.v_floor must be positive");

  const PriorSpec& s = c.prior;
  prior_keys(s.profile);
  if (s.profile == "two_lobe") {
    if (!in_unit(s.lobe_beta) || !in_unit(s.floor_beta)) fail("prior betas must lie in [0, 1]");
    if (!(s.lobe_fraction > 0.0 && s.lobe_fraction <= 1.0)) fail("prior.lobe_fraction must lie in (0, 1]");
    for (double center : s.lobe_centers) {
      if (!in_unit(center)) fail("prior.lobe_centers must lie in [0, 1]");
    }
  } else if (s.profile == "uniform") {
    if (!in_unit(s.beta)) fail("prior.beta must lie in [0, 1]");
  } else if (s.profile == "ramp") {
    if (!in_unit(s.low) || !in_unit(s.high)) fail("prior.low/high must lie in [0, 1]");
  } else if (s.path.empty()) {
    fail("prior.path is required for profile " + s.profile);
  }
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["d"] = c.d;
  j["mode"] = to_string(c.mode);
  j["field"] = to_string(c.field);
  j["ell"] = c.ell;
  j["prior"] = prior_to_json(c.prior);
  j["m_grid"] = c.m_grid;
  j["n_trials"] = c.n_trials;
  j["eta"] = c.eta;
  j["noise"] = to_string(c.noise);
  j["methods"] = c.methods;
  j["base_seed"] = c.base_seed;
  j["output_dir"] = c.output_dir;
  j["weight_prior"] = c.weight_prior;
  j["prior_calibration_samples"] = c.prior_calibration_samples;
  j["heuristic_eps"] = c.heuristic_eps;
  j["pair_extremes"] = to_string(c.pair_extremes);
  j["success_tol"] = c.success_tol;
  j["error_bound_a"] = c.error_bound_a;
  j["solver"] = {{"max_iter", c.solver_max_iter},
                 {"tol_feas", c.solver_tol_feas},
                 {"tol_opt", c.solver_tol_opt},
                 {"relaxation", c.solver_relaxation}};
  j["statdim"] = {{"n_mc", c.statdim_n_mc},
                  {"max_iter", c.statdim_max_iter},
                  {"tol", c.statdim_tol}};
  j["weights"] = {{"random_starts", c.weights_random_starts},
                  {"max_iter", c.weights_max_iter},
                  {"v_floor", c.weights_v_floor}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"n", "p", "d", "mode", "field", "ell", "prior", "m_grid", "n_trials", "eta",
                  "noise", "methods", "base_seed", "output_dir", "weight_prior",
                  "prior_calibration_samples", "heuristic_eps", "pair_extremes", "success_tol",
                  "error_bound_a", "solver", "statdim", "weights"},
                 "config");
  ExperimentConfig c;
  const std::string where = "config";
  read(j, "n", c.n, where);
  read(j, "p", c.p, where);
  read(j, "d", c.d, where);
  read(j, "ell", c.ell, where);
  read(j, "m_grid", c.m_grid, where);
  read(j, "n_trials", c.n_trials, where);
  read(j, "eta", c.eta, where);
  read(j, "methods", c.methods, where);
  read(j, "base_seed", c.base_seed, where);
  read(j, "output_dir", c.output_dir, where);
  read(j, "weight_prior", c.weight_prior, where);
  read(j, "prior_calibration_samples", c.prior_calibration_samples, where);
  read(j, "heuristic_eps", c.heuristic_eps, where);
  read(j, "success_tol", c.success_tol, where);
  read(j, "error_bound_a", c.error_bound_a, where);

  try {
    if (j.contains("mode")) c.mode = frame_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("field")) c.field = field_from_string(j.at("field").get<std::string>());
    if (j.contains("noise")) c.noise = noise_model_from_string(j.at("noise").get<std::string>());
    if (j.contains("pair_extremes")) {
      c.pair_extremes = pair_extremes_from_string(j.at("pair_extremes").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (j.contains("prior")) c.prior = prior_from_json(j.at("prior"));
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, {"max_iter", "tol_feas", "tol_opt", "relaxation"}, "solver");
    read(s, "max_iter", c.solver_max_iter, "solver");
    read(s, "tol_feas", c.solver_tol_feas, "solver");
    read(s, "tol_opt", c.solver_tol_opt, "solver");
    read(s, "relaxation", c.solver_relaxation, "solver");
  }
  if (j.contains("statdim")) {
    const json& s = j.at("statdim");
    reject_unknown(s, {"n_mc", "max_iter", "tol"}, "statdim");
    read(s, "n_mc", c.statdim_n_mc, "statdim");
    read(s, "max_iter", c.statdim_max_iter, "statdim");
    read(s, "tol", c.statdim_tol, "statdim");
  }
  if (j.contains("weights")) {
    const json& s = j.at("weights");
    reject_unknown(s, {"random_starts", "max_iter", "v_floor"}, "weights");
    read(s, "random_starts", c.weights_random_starts, "weights");
    read(s, "max_iter", c.weights_max_iter, "weights");
    read(s, "v_floor", c.weights_v_floor, "weights");
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_json(config).dump(2) << '\n';
}

RVector beta_profile(const PriorSpec& s, int p, Field field) {
  if (field == Field::real && p % 2 != 0) throw ConfigError("real field requires even p");
  const int bins = field == Field::real ? p / 2 : p;
  RVector beta(bins);
  if (s.profile == "two_lobe") {
    beta.setConstant(s.floor_beta);
    const int width = std::max(1, static_cast<int>(std::lround(s.lobe_fraction * bins)));
    for (double center : s.lobe_centers) {
      const int mid = static_cast<int>(std::lround(center * bins));
      const int first = std::max(0, mid - width / 2);
      const int last = std::min(bins, first + width);
      for (int k = first; k < last; ++k) beta[k] = s.lobe_beta;
    }
  } else if (s.profile == "uniform") {
    beta.setConstant(s.beta);
  } else if (s.profile == "ramp") {
    for (int k = 0; k < bins; ++k) {
      beta[k] = bins == 1 ? s.low : s.low + (s.high - s.low) * k / (bins - 1.0);
    }
  } else if (s.profile == "beta_csv") {
    const std::vector<double> values = read_beta_csv(s.path);
    if (static_cast<int>(values.size()) != p) {
      throw ConfigError("prior csv '" + s.path + "' has " + std::to_string(values.size()) +
                        " bins, expected p = " + std::to_string(p));
    }
    return Eigen::Map<const RVector>(values.data(), p);
  } else if (s.profile == "prior_csv") {
    const ChannelPrior prior = read_prior_csv(s.path);
    if (prior.p() != p) throw ConfigError("prior csv '" + s.path + "' does not match p");
    return prior.beta;
  } else {
    prior_keys(s.profile);
  }
  if (field == Field::complex) return beta;
  RVector rows(p);
  for (int k = 0; k < bins; ++k) rows[2 * k] = rows[2 * k + 1] = beta[k];
  return rows;
}

ChannelPrior nominal_prior(const PriorSpec& spec, int p, Field field) {
  if (spec.profile == "prior_csv") {
    ChannelPrior prior = read_prior_csv(spec.path);
    if (prior.p() != p) throw ConfigError("prior csv '" + spec.path + "' does not match p");
    return prior;
  }
  return independent_symmetric_prior(beta_profile(spec, p, field));
}

AnalysisFrame config_frame(const ExperimentConfig& c) {
  return make_frame(c.n, c.p, c.d, c.mode, c.field);
}

SolverOptions config_solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.max_iter = c.solver_max_iter;
  o.tol_feas = c.solver_tol_feas;
  o.tol_opt = c.solver_tol_opt;
  o.relaxation = c.solver_relaxation;
  return o;
}

}  // namespace angsparse
