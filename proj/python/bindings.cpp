#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "angsparse/bound.hpp"
#include "angsparse/config.hpp"
#include "angsparse/error.hpp"
#include "angsparse/frame.hpp"
#include "angsparse/harness.hpp"
#include "angsparse/priors.hpp"
#include "angsparse/solver.hpp"
#include "angsparse/statdim.hpp"
#include "angsparse/synth.hpp"
#include "angsparse/weights.hpp"

namespace py = pybind11;
using namespace angsparse;

namespace {

ExperimentConfig parse_config(const std::string& text) {
  if (text.empty()) return ExperimentConfig{};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

py::dict summary_row(const SummaryRow& r) {
  py::dict d;
  d["m"] = r.m;
  d["method"] = r.method;
  d["mean_error"] = r.mean_error;
  d["stderr"] = r.stderr;
  d["success_rate"] = r.success_rate;
  d["n_converged"] = r.n_converged;
  return d;
}

py::dict validation_row(const ValidationRow& r) {
  py::dict d;
  d["setting"] = r.setting;
  d["statdim_upper"] = r.statdim_upper;
  d["bound_valid"] = r.bound_valid;
  d["empirical_mean"] = r.empirical_mean;
  d["empirical_stderr"] = r.empirical_stderr;
  d["n_failed"] = r.n_failed;
  d["dominated"] = r.dominated;
  d["units"] = r.units;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted analysis-l1 channel recovery with angular priors";

  // Base first: pybind11 tries translators in reverse registration order.
  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<PriorError>(m, "PriorError", error.ptr());
  py::register_exception<WeightError>(m, "WeightError", error.ptr());
  py::register_exception<FeasibilityError>(m, "FeasibilityError", error.ptr());
  py::register_exception<DegenerateBoundError>(m, "DegenerateBoundError", error.ptr());

  py::class_<AnalysisFrame>(m, "Frame")
      .def_property_readonly("n", &AnalysisFrame::n)
      .def_property_readonly("p", &AnalysisFrame::p)
      .def_property_readonly("mode", [](const AnalysisFrame& f) { return to_string(f.mode()); })
      .def_property_readonly("field", [](const AnalysisFrame& f) { return to_string(f.field()); })
      .def_property_readonly("omega", &AnalysisFrame::omega)
      .def("gram_defect", &AnalysisFrame::gram_defect)
      .def("analyze", &AnalysisFrame::analyze, py::arg("x"))
      .def("__repr__", [](const AnalysisFrame& f) {
        return "<Frame n=" + std::to_string(f.n()) + " p=" + std::to_string(f.p()) + " " +
               to_string(f.mode()) + " " + to_string(f.field()) + ">";
      });

  m.def(
      "build_frame",
      [](int n, int p, double spacing, const std::string& mode, const std::string& field) {
        return make_frame(n, p, spacing, frame_mode_from_string(mode), field_from_string(field));
      },
      py::arg("n"), py::arg("p"), py::arg("spacing") = 0.5, py::arg("mode") = "orthogonal",
      py::arg("field") = "complex");
  m.def("identity_frame", &identity_frame, py::arg("n"));

  py::class_<ChannelPrior>(m, "Prior")
      .def_readonly("beta", &ChannelPrior::beta)
      .def_readonly("beta_joint", &ChannelPrior::beta_joint)
      .def_readonly("sigma", &ChannelPrior::sigma)
      .def_property_readonly("p", &ChannelPrior::p);
  m.def(
      "independent_prior",
      [](const RVector& beta) { return independent_symmetric_prior(beta); }, py::arg("beta"));
  m.def(
      "estimate_prior",
      [](const CMatrix& samples, double zero_tol) {
        std::vector<CVector> rows;
        for (Eigen::Index i = 0; i < samples.rows(); ++i) rows.emplace_back(samples.row(i).transpose());
        return estimate_prior(rows, zero_tol);
      },
      py::arg("samples"), py::arg("zero_tol") = 1e-9,
      "Prior from analysis coefficients, one sample per row.");

  m.def("q", py::vectorize(q_func), py::arg("t"));

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("statdim_upper", &BoundReport::statdim_upper)
      .def_readonly("t_star", &BoundReport::t_star)
      .def_readonly("lambda_star", &BoundReport::lambda_star)
      .def_readonly("valid", &BoundReport::valid)
      .def_readonly("n", &BoundReport::n)
      .def("__repr__", [](const BoundReport& r) {
        return "<BoundReport statdim_upper=" + std::to_string(r.statdim_upper) +
               " t_star=" + std::to_string(r.t_star) + (r.valid ? "" : " invalid") + ">";
      });

  m.def(
      "statdim_upper",
      [](const RVector& v, const AnalysisFrame& frame, const ChannelPrior& prior, double lo,
         double hi, int resolution, const std::string& extremes) {
        TSearch s;
        s.lo = lo;
        s.hi = hi;
        s.resolution = resolution;
        s.extremes = pair_extremes_from_string(extremes);
        return statdim_upper(Weights(v), frame, prior, s);
      },
      py::arg("v"), py::arg("frame"), py::arg("prior"), py::arg("lo") = 1e-3, py::arg("hi") = 1e3,
      py::arg("resolution") = 601, py::arg("extremes") = "per_pair");
  m.def(
      "bound_denominator",
      [](double t, const RVector& v, const AnalysisFrame& frame, const ChannelPrior& prior,
         const std::string& extremes) {
        return bound_denominator(t, Weights(v), frame, prior, pair_extremes_from_string(extremes));
      },
      py::arg("t"), py::arg("v"), py::arg("frame"), py::arg("prior"),
      py::arg("extremes") = "per_pair");
  m.def(
      "error_upper",
      [](double statdim, int pilots, double eta, double a) {
        const ErrorBound e = error_upper(statdim, pilots, eta, a);
        py::dict d;
        d["value"] = e.value;
        d["finite"] = e.finite;
        d["probability"] = e.probability;
        return d;
      },
      py::arg("statdim"), py::arg("m"), py::arg("eta"), py::arg("a") = 1.0);

  py::class_<SolverResult>(m, "SolverResult")
      .def_readonly("estimate", &SolverResult::estimate)
      .def_readonly("objective", &SolverResult::objective)
      .def_readonly("residual", &SolverResult::residual)
      .def_readonly("dual_bound", &SolverResult::dual_bound)
      .def_readonly("iterations", &SolverResult::iterations)
      .def_readonly("converged", &SolverResult::converged);
  m.def(
      "solve",
      [](const CMatrix& A, const CVector& y, const AnalysisFrame& frame, const RVector& v,
         double eta, int max_iter, double tol_feas, double tol_opt) {
        SolverOptions o;
        o.max_iter = max_iter;
        o.tol_feas = tol_feas;
        o.tol_opt = tol_opt;
        py::gil_scoped_release release;
        return solve(A, y, frame, Weights(v), eta, o);
      },
      py::arg("A"), py::arg("y"), py::arg("frame"), py::arg("v"), py::arg("eta") = 0.0,
      py::arg("max_iter") = 20000, py::arg("tol_feas") = 1e-8, py::arg("tol_opt") = 1e-8);

  m.def(
      "optimize_weights",
      [](const AnalysisFrame& frame, const ChannelPrior& prior, std::uint64_t seed,
         int random_starts, int max_iter, double v_floor, int threads) {
        WeightOptions o;
        o.seed = seed;
        o.random_starts = random_starts;
        o.max_iter = max_iter;
        o.v_floor = v_floor;
        o.threads = threads;
        WeightResult r = [&] {
          py::gil_scoped_release release;
          return optimize_weights(frame, prior, o);
        }();
        return py::make_tuple(RVector(r.weights.values()), r.report);
      },
      py::arg("frame"), py::arg("prior"), py::arg("seed") = 0, py::arg("random_starts") = 2,
      py::arg("max_iter") = 1000, py::arg("v_floor") = 1e-4, py::arg("threads") = 1,
      "Returns (weights, BoundReport).");
  m.def(
      "heuristic_weights",
      [](const RVector& beta, double eps) { return RVector(heuristic_weights(beta, eps).values()); },
      py::arg("beta"), py::arg("eps") = 0.05);

  py::class_<StatDimEstimate>(m, "StatDimEstimate")
      .def_readonly("mean", &StatDimEstimate::mean)
      .def_readonly("stderr", &StatDimEstimate::stderr)
      .def_readonly("n_mc", &StatDimEstimate::n_mc)
      .def_readonly("n_failed", &StatDimEstimate::n_failed)
      .def_readonly("ambient_dim", &StatDimEstimate::ambient_dim)
      .def_readonly("samples", &StatDimEstimate::samples);
  m.def(
      "empirical_statdim",
      [](const AnalysisFrame& frame, const RVector& v, const CVector& h, int n_mc,
         std::uint64_t seed, int threads, bool keep_samples) {
        StatDimOptions o;
        o.threads = threads;
        o.keep_samples = keep_samples;
        py::gil_scoped_release release;
        return empirical_statdim(frame, Weights(v), h, n_mc, seed, o);
      },
      py::arg("frame"), py::arg("v"), py::arg("h"), py::arg("n_mc") = 200, py::arg("seed") = 0,
      py::arg("threads") = 1, py::arg("keep_samples") = false);

  m.def("default_config_json", [] { return to_json(ExperimentConfig{}).dump(); });
  m.def(
      "normalize_config_json",
      [](const std::string& text) { return to_json(parse_config(text)).dump(); },
      py::arg("config"), "Validates a JSON config and fills in defaults.");
  m.def(
      "run_error_vs_pilots",
      [](const std::string& text, int threads, const std::string& out) {
        const ExperimentConfig c = parse_config(text);
        SimulationResult r = [&] {
          py::gil_scoped_release release;
          return run_error_vs_pilots(c, threads);
        }();
        if (!out.empty()) write_simulation(r, c, out);
        py::list rows;
        for (const SummaryRow& row : r.summary) rows.append(summary_row(row));
        return rows;
      },
      py::arg("config"), py::arg("threads") = 1, py::arg("out") = "");
  m.def(
      "run_bound_validation",
      [](const std::string& text, int threads) {
        const ExperimentConfig c = parse_config(text);
        std::vector<ValidationRow> r = [&] {
          py::gil_scoped_release release;
          return run_bound_validation(c, threads);
        }();
        py::list rows;
        for (const ValidationRow& row : r) rows.append(validation_row(row));
        return rows;
      },
      py::arg("config"), py::arg("threads") = 1);
}
