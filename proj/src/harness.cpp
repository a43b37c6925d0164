#include "angsparse/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "angsparse/error.hpp"
#include "angsparse/parallel.hpp"
#include "angsparse/rng.hpp"

namespace angsparse {

namespace fs = std::filesystem;

namespace {

std::uint64_t u64(int x) { return static_cast<std::uint64_t>(x); }

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

TSearch config_search(const ExperimentConfig& config) {
  TSearch search;
  search.extremes = config.pair_extremes;
  return search;
}

StatDimOptions config_statdim_options(const ExperimentConfig& config, int threads) {
  StatDimOptions opts;
  opts.inner.max_iter = config.statdim_max_iter;
  opts.inner.tol = config.statdim_tol;
  opts.threads = threads;
  opts.keep_samples = true;
  return opts;
}

std::vector<ChannelRealization> draw_channels(const ExperimentConfig& config,
                                              const AnalysisFrame& frame, const RVector& beta,
                                              int count, std::uint64_t (SeedPlan::*stream)(int) const,
                                              int threads) {
  const SeedPlan seeds{config.base_seed};
  std::vector<ChannelRealization> channels(static_cast<std::size_t>(count));
  parallel_for(channels.size(), threads, [&](std::size_t i) {
    channels[i] = draw_channel(frame, beta, config.ell, (seeds.*stream)(static_cast<int>(i)));
  });
  return channels;
}

}  // namespace

std::uint64_t SeedPlan::channel(int trial) const { return derive_seed(base, {u64(trial), 0}); }
std::uint64_t SeedPlan::pilots(int trial, int m) const {
  return derive_seed(base, {u64(trial), u64(m), 1});
}
std::uint64_t SeedPlan::noise(int trial, int m) const {
  return derive_seed(base, {u64(trial), u64(m), 2});
}
std::uint64_t SeedPlan::calibration(int index) const { return derive_seed(base, {u64(index), 3}); }
std::uint64_t SeedPlan::validation(int index) const { return derive_seed(base, {u64(index), 4}); }
std::uint64_t SeedPlan::weight_starts() const { return derive_seed(base, {5}); }
std::uint64_t SeedPlan::gaussian_draws() const { return derive_seed(base, {6}); }

ChannelRealization draw_channel(const AnalysisFrame& frame, const RVector& beta, int ell,
                                std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> cosupport = sample_cosupport(beta, ell, frame.n(), rng);
  return synth_channel(frame, cosupport, rng);
}

ChannelPrior calibrate_prior(const ExperimentConfig& config, const AnalysisFrame& frame,
                             int samples, int threads) {
  const RVector beta = beta_profile(config.prior, config.p, config.field);
  const auto channels =
      draw_channels(config, frame, beta, samples, &SeedPlan::calibration, threads);
  std::vector<CVector> analyzed;
  analyzed.reserve(channels.size());
  for (const auto& ch : channels) analyzed.push_back(ch.h_a);
  return estimate_prior(analyzed);
}

Weights method_weights(const std::string& method, const AnalysisFrame& frame,
                       const ChannelPrior& prior, const ExperimentConfig& config, int threads) {
  if (method == "uniform") return Weights::uniform(frame.p());
  if (method == "heuristic") return heuristic_weights(prior.beta, config.heuristic_eps);
  if (method == "optimal") {
    WeightOptions opts;
    opts.random_starts = config.weights_random_starts;
    opts.max_iter = config.weights_max_iter;
    opts.v_floor = config.weights_v_floor;
    opts.heuristic_eps = config.heuristic_eps;
    opts.seed = SeedPlan{config.base_seed}.weight_starts();
    opts.threads = threads;
    opts.search = config_search(config);
    return optimize_weights(frame, prior, opts).weights;
  }
  throw ConfigError("unknown method '" + method + "'");
}

ExperimentContext prepare_experiment(const ExperimentConfig& config, int threads) {
  validate(config);
  AnalysisFrame frame = config_frame(config);
  ChannelPrior nominal = nominal_prior(config.prior, config.p, config.field);
  ChannelPrior weight_prior = config.weight_prior == "estimated"
                                  ? calibrate_prior(config, frame,
                                                    config.prior_calibration_samples, threads)
                                  : nominal;
  std::vector<MethodWeights> methods;
  for (const auto& name : config.methods) {
    Weights w = method_weights(name, frame, weight_prior, config, threads);
    BoundReport report = statdim_upper(w, frame, weight_prior, config_search(config));
    methods.push_back({name, std::move(w), report});
  }
  return {config, std::move(frame), std::move(nominal), std::move(weight_prior),
          std::move(methods)};
}

double success_threshold(const ExperimentConfig& config, int m) {
  if (config.eta == 0.0) return config.success_tol;
  return 2.0 * config.eta / std::sqrt(static_cast<double>(m));
}

SimulationResult run_error_vs_pilots(const ExperimentContext& ctx, int threads) {
  const ExperimentConfig& cfg = ctx.config;
  const SeedPlan seeds{cfg.base_seed};
  const auto channels =
      draw_channels(cfg, ctx.frame, ctx.nominal.beta, cfg.n_trials, &SeedPlan::channel, threads);
  const SolverOptions solver_opts = config_solver_options(cfg);

  const std::size_t n_m = cfg.m_grid.size();
  const std::size_t n_methods = ctx.methods.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.n_trials);
  SimulationResult result;
  result.methods = ctx.methods;
  result.weight_beta = ctx.weight_prior.beta;
  result.trials.resize(n_m * n_methods * n_trials);

  parallel_for(result.trials.size(), threads, [&](std::size_t idx) {
    const std::size_t trial = idx % n_trials;
    const std::size_t method = (idx / n_trials) % n_methods;
    const std::size_t mi = idx / (n_trials * n_methods);
    const int m = cfg.m_grid[mi];
    const int t = static_cast<int>(trial);
    TrialRecord& rec = result.trials[idx];
    rec.trial_index = t;
    rec.m = m;
    rec.method = ctx.methods[method].method;
    rec.channel_seed = seeds.channel(t);
    rec.pilot_seed = seeds.pilots(t, m);
    rec.noise_seed = seeds.noise(t, m);
    try {
      const PilotSetup setup = gen_pilots(m, cfg.n, cfg.field, rec.pilot_seed);
      const Measurement meas = measure(setup, channels[trial].h, cfg.eta, rec.noise_seed, cfg.noise);
      const SolverResult sol =
          solve(setup.A, meas.y, ctx.frame, ctx.methods[method].weights, meas.eta, solver_opts);
      rec.recovery_error = (sol.estimate - channels[trial].h).norm();
      rec.iterations = sol.iterations;
      rec.converged = sol.converged;
      rec.success = sol.converged && rec.recovery_error <= success_threshold(cfg, m);
    } catch (const Error& e) {
      throw Error("trial " + std::to_string(t) + ", m = " + std::to_string(m) + ", method " +
                  rec.method + ": " + e.what());
    }
  });

  for (std::size_t mi = 0; mi < n_m; ++mi) {
    for (std::size_t method = 0; method < n_methods; ++method) {
      SummaryRow row;
      row.m = cfg.m_grid[mi];
      row.method = ctx.methods[method].method;
      double sum = 0.0;
      int successes = 0;
      const std::size_t first = (mi * n_methods + method) * n_trials;
      for (std::size_t i = first; i < first + n_trials; ++i) {
        const TrialRecord& rec = result.trials[i];
        if (!rec.converged) continue;
        ++row.n_converged;
        sum += rec.recovery_error;
        successes += rec.success;
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.mean_error = row.n_converged > 0 ? sum / row.n_converged : nan;
      row.success_rate = row.n_converged > 0 ? double(successes) / row.n_converged : nan;
      row.stderr = nan;
      if (row.n_converged > 1) {
        double ss = 0.0;
        for (std::size_t i = first; i < first + n_trials; ++i) {
          const TrialRecord& rec = result.trials[i];
          if (rec.converged) ss += std::pow(rec.recovery_error - row.mean_error, 2);
        }
        row.stderr = std::sqrt(ss / (row.n_converged - 1) / row.n_converged);
      }
      result.summary.push_back(row);
    }
  }
  return result;
}

SimulationResult run_error_vs_pilots(const ExperimentConfig& config, int threads) {
  return run_error_vs_pilots(prepare_experiment(config, threads), threads);
}

void write_weights_csv(const std::string& path, const RVector& beta, const Weights& v) {
  if (beta.size() != v.size()) throw DimensionError("weights csv: beta and weights differ in length");
  auto out = open_out(path);
  out << "bin_index,beta,weight\n";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    out << k << ',' << fmt(beta[k]) << ',' << fmt(v[k]) << '\n';
  }
}

void write_simulation(const SimulationResult& result, const ExperimentConfig& config,
                      const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / "plots");

  {
    auto out = open_out(root / "error_vs_pilots.csv");
    out << "m,method,mean_error,stderr,success_rate,n_converged\n";
    for (const auto& r : result.summary) {
      out << r.m << ',' << r.method << ',' << fmt(r.mean_error) << ',' << fmt(r.stderr) << ','
          << fmt(r.success_rate) << ',' << r.n_converged << '\n';
    }
  }
  {
    auto out = open_out(root / "trials.csv");
    out << "trial_index,m,method,recovery_error,iterations,converged,success,channel_seed,"
           "pilot_seed,noise_seed\n";
    for (const auto& t : result.trials) {
      out << t.trial_index << ',' << t.m << ',' << t.method << ',' << fmt(t.recovery_error) << ','
          << t.iterations << ',' << int(t.converged) << ',' << int(t.success) << ','
          << t.channel_seed << ',' << t.pilot_seed << ',' << t.noise_seed << '\n';
    }
  }
  for (const auto& mw : result.methods) {
    write_weights_csv((root / ("weights_" + mw.method + ".csv")).string(), result.weight_beta,
                      mw.weights);
    auto out = open_out(root / "plots" / (mw.method + ".dat"));
    out << "# m mean_error\n";
    for (const auto& r : result.summary) {
      if (r.method == mw.method) out << r.m << ' ' << fmt(r.mean_error) << '\n';
    }
  }

  nlohmann::ordered_json meta;
  meta["config"] = to_json(config);
  meta["records"] = result.trials.size();
  meta["success_rule"] =
      config.eta == 0.0 ? "recovery_error <= " + fmt(config.success_tol)
                        : std::string("recovery_error <= 2 * eta / sqrt(m)");
  meta["averaging"] = "mean_error, stderr and success_rate are over converged trials only";
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (const auto& mw : result.methods) {
    methods.push_back({{"method", mw.method},
                       {"statdim_upper", mw.report.statdim_upper},
                       {"t_star", mw.report.t_star},
                       {"lambda_star", mw.report.lambda_star},
                       {"valid", mw.report.valid},
                       {"weight_ratio", mw.weights.max() / mw.weights.min()}});
  }
  meta["methods"] = methods;
  auto out = open_out(root / "metadata.json");
  out << meta.dump(2) << '\n';
}

std::vector<ValidationRow> run_bound_validation(const ExperimentContext& ctx, int threads) {
  const ExperimentConfig& cfg = ctx.config;
  const SeedPlan seeds{cfg.base_seed};
  const ChannelPrior estimated =
      cfg.weight_prior == "estimated"
          ? ctx.weight_prior
          : calibrate_prior(cfg, ctx.frame, cfg.prior_calibration_samples, threads);
  const auto channels = draw_channels(cfg, ctx.frame, ctx.nominal.beta, cfg.statdim_n_mc,
                                      &SeedPlan::validation, threads);
  const StatDimOptions opts = config_statdim_options(cfg, threads);
  const bool complex = cfg.field == Field::complex;

  std::vector<ValidationRow> rows;
  for (const auto& mw : ctx.methods) {
    ValidationRow row;
    row.setting = cfg.prior.profile + "/" + mw.method;
    const BoundReport bound = statdim_upper(mw.weights, ctx.frame, estimated, config_search(cfg));
    row.statdim_upper = bound.statdim_upper;
    row.bound_valid = bound.valid;
    const StatDimEstimate est =
        ensemble_statdim(ctx.frame, mw.weights, channels, seeds.gaussian_draws(), opts);
    const double scale = complex ? 0.5 : 1.0;
    row.empirical_mean = scale * est.mean;
    row.empirical_stderr = scale * est.stderr;
    row.n_failed = est.n_failed;
    row.units = complex ? "complex" : "real";
    row.dominated = row.statdim_upper >= row.empirical_mean - 2.0 * row.empirical_stderr;
    row.samples = est.samples;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ValidationRow> run_bound_validation(const ExperimentConfig& config, int threads) {
  return run_bound_validation(prepare_experiment(config, threads), threads);
}

void write_validation(const std::vector<ValidationRow>& rows, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  {
    auto out = open_out(root / "validation.csv");
    out << "setting,statdim_upper,bound_valid,empirical_mean,empirical_stderr,n_failed,dominated,"
           "units\n";
    for (const auto& r : rows) {
      out << r.setting << ',' << fmt(r.statdim_upper) << ',' << int(r.bound_valid) << ','
          << fmt(r.empirical_mean) << ',' << fmt(r.empirical_stderr) << ',' << r.n_failed << ','
          << int(r.dominated) << ',' << r.units << '\n';
    }
  }
  auto out = open_out(root / "statdim_samples.csv");
  out << "setting,draw,dist2\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      out << r.setting << ',' << i << ',' << fmt(r.samples[i]) << '\n';
    }
  }
}

void write_bounds(const std::vector<MethodWeights>& methods, const ExperimentConfig& config,
                  const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  {
    auto out = open_out(root / "bounds.csv");
    out << "method,t_star,lambda_star,statdim_upper,valid\n";
    for (const auto& mw : methods) {
      out << mw.method << ',' << fmt(mw.report.t_star) << ',' << fmt(mw.report.lambda_star) << ','
          << fmt(mw.report.statdim_upper) << ',' << int(mw.report.valid) << '\n';
    }
  }
  auto out = open_out(root / "error_bounds.csv");
  out << "method,m,eta,a,error_upper,finite,probability\n";
  for (const auto& mw : methods) {
    for (int m : config.m_grid) {
      const ErrorBound eb = error_upper(mw.report, m, config.eta, config.error_bound_a);
      out << mw.method << ',' << m << ',' << fmt(config.eta) << ',' << fmt(config.error_bound_a)
          << ',' << fmt(eb.value) << ',' << int(eb.finite) << ',' << fmt(eb.probability) << '\n';
    }
  }
}

}  // namespace angsparse
