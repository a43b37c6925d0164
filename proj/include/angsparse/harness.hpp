#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "angsparse/config.hpp"
#include "angsparse/statdim.hpp"
#include "angsparse/weights.hpp"

namespace angsparse {

// Seed streams, all derived from base_seed with derive_seed.
struct SeedPlan {
  std::uint64_t base = 0;
  std::uint64_t channel(int trial) const;
  std::uint64_t pilots(int trial, int m) const;
  std::uint64_t noise(int trial, int m) const;
  std::uint64_t calibration(int index) const;
  std::uint64_t validation(int index) const;
  std::uint64_t weight_starts() const;
  std::uint64_t gaussian_draws() const;
};

// Cosupport and channel for one seed.
ChannelRealization draw_channel(const AnalysisFrame& frame, const RVector& beta, int ell,
                                std::uint64_t seed);

struct MethodWeights {
  std::string method;
  Weights weights;
  BoundReport report;  // under the weight prior
};

struct ExperimentContext {
  ExperimentConfig config;
  AnalysisFrame frame;
  ChannelPrior nominal;
  ChannelPrior weight_prior;  // nominal or estimated, per config.weight_prior
  std::vector<MethodWeights> methods;
};

// Prior estimated from `samples` channels drawn from the configured model.
ChannelPrior calibrate_prior(const ExperimentConfig& config, const AnalysisFrame& frame,
                             int samples, int threads = 1);
Weights method_weights(const std::string& method, const AnalysisFrame& frame,
                       const ChannelPrior& prior, const ExperimentConfig& config,
                       int threads = 1);
ExperimentContext prepare_experiment(const ExperimentConfig& config, int threads = 1);

struct TrialRecord {
  int trial_index = 0;
  int m = 0;
  std::string method;
  double recovery_error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool success = false;
  std::uint64_t channel_seed = 0;
  std::uint64_t pilot_seed = 0;
  std::uint64_t noise_seed = 0;
};

struct SummaryRow {
  int m = 0;
  std::string method;
  double mean_error = 0.0;
  double stderr = 0.0;
  double success_rate = 0.0;  // over converged trials
  int n_converged = 0;
};

struct SimulationResult {
  std::vector<TrialRecord> trials;  // ordered by m, method, trial
  std::vector<SummaryRow> summary;  // ordered by m, method
  std::vector<MethodWeights> methods;
  RVector weight_beta;  // beta of the prior the weights were built from
};

// Success threshold on ||h - h_hat||: success_tol when eta = 0, else 2 eta / sqrt(m).
double success_threshold(const ExperimentConfig& config, int m);

SimulationResult run_error_vs_pilots(const ExperimentContext& context, int threads = 1);
SimulationResult run_error_vs_pilots(const ExperimentConfig& config, int threads = 1);

// Writes error_vs_pilots.csv, trials.csv, weights_<method>.csv, metadata.json
// and plots/<method>.dat under dir.
void write_simulation(const SimulationResult& result, const ExperimentConfig& config,
                      const std::string& dir);

struct ValidationRow {
  std::string setting;  // "<prior profile>/<method>"
  double statdim_upper = 0.0;
  bool bound_valid = false;
  double empirical_mean = 0.0;
  double empirical_stderr = 0.0;
  int n_failed = 0;
  bool dominated = false;  // statdim_upper >= empirical_mean - 2 stderr
  std::string units;       // "real", or "complex" (empirical halved) for complex frames
  std::vector<double> samples;
};

// Bound under a prior estimated from a calibration ensemble against the
// ensemble statistical dimension of fresh channels, for every configured
// method. Complex frames are reported per complex dimension.
std::vector<ValidationRow> run_bound_validation(const ExperimentContext& context,
                                                int threads = 1);
std::vector<ValidationRow> run_bound_validation(const ExperimentConfig& config,
                                                int threads = 1);
void write_validation(const std::vector<ValidationRow>& rows, const std::string& dir);

void write_bounds(const std::vector<MethodWeights>& methods, const ExperimentConfig& config,
                  const std::string& dir);
void write_weights_csv(const std::string& path, const RVector& beta, const Weights& v);

}  // namespace angsparse
