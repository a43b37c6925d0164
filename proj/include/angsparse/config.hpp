#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "angsparse/bound.hpp"
#include "angsparse/frame.hpp"
#include "angsparse/priors.hpp"
#include "angsparse/solver.hpp"
#include "angsparse/synth.hpp"

namespace angsparse {

// Angular support profile. Only the keys of the chosen profile are accepted:
//   two_lobe:  lobe_beta, floor_beta, lobe_fraction, lobe_centers
//   uniform:   beta
//   ramp:      low, high
//   beta_csv:  path   (bin_index,beta; joint terms from the independent model)
//   prior_csv: path   (i,j,beta_joint,sigma)
struct PriorSpec {
  std::string profile = "two_lobe";
  double lobe_beta = 0.9;
  double floor_beta = 0.02;
  double lobe_fraction = 0.15;             // bins per lobe, as a fraction of the angle bins
  std::vector<double> lobe_centers = {0.3, 0.65};  // lobe centres, as fractions of the bins
  double beta = 0.5;
  double low = 0.05;
  double high = 0.95;
  std::string path;
};

struct ExperimentConfig {
  int n = 32;
  int p = 128;
  double d = 0.5;
  FrameMode mode = FrameMode::orthogonal;
  Field field = Field::complex;
  int ell = 24;
  PriorSpec prior;
  std::vector<int> m_grid = {8, 12, 16, 20, 24, 28, 32, 36, 40, 44, 48};
  int n_trials = 100;
  double eta = 0.0;
  NoiseModel noise = NoiseModel::sphere;
  std::vector<std::string> methods = {"uniform", "heuristic", "optimal"};
  std::uint64_t base_seed = 1;
  std::string output_dir = "results";

  // Prior handed to the weight optimizer and the bounds: the nominal profile,
  // or one estimated from a calibration ensemble of synthesized channels.
  std::string weight_prior = "nominal";
  int prior_calibration_samples = 2000;
  double heuristic_eps = 0.05;
  PairExtremes pair_extremes = PairExtremes::per_pair;
  double success_tol = 1e-4;   // noise-free success threshold on ||h - h_hat||
  double error_bound_a = 1.0;  // confidence parameter of the error bound

  int solver_max_iter = 20000;
  double solver_tol_feas = 1e-8;
  double solver_tol_opt = 1e-8;
  double solver_relaxation = 1.8;

  int statdim_n_mc = 200;
  int statdim_max_iter = 5000;
  double statdim_tol = 1e-8;

  int weights_random_starts = 2;
  int weights_max_iter = 1000;
  double weights_v_floor = 1e-4;
};

// Throws ConfigError on any inconsistency.
void validate(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
// Unknown keys are rejected; missing keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

// The beta profile described by `spec` over the frame's rows. For real frames the
// profile is laid out over the p/2 angle bins and each value repeated for the
// two rows of a bin.
RVector beta_profile(const PriorSpec& spec, int p, Field field);
ChannelPrior nominal_prior(const PriorSpec& spec, int p, Field field);

AnalysisFrame config_frame(const ExperimentConfig& config);
SolverOptions config_solver_options(const ExperimentConfig& config);

}  // namespace angsparse
