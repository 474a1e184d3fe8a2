#pragma once

// Experiment orchestration: domain, per-ball baselines, nondegeneracy check,
// optional supersolutions, kappa continuation, optional uniqueness probe and
// artifact emission. Failures are recorded against the stage that raised them
// and the summary is written regardless.

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "diagnostics.hpp"
#include "discrete_ops.hpp"
#include "errors.hpp"
#include "field_io.hpp"
#include "grid_domain.hpp"
#include "report_json.hpp"
#include "scalar_solver.hpp"
#include "system_solver.hpp"
#include "uniqueness.hpp"

namespace segregation {

/// How far a run goes. Each mode includes the stages of the ones before it.
enum class RunMode { solve_baseline, nd_check, continuation, probe_uniqueness };

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct BaselineInfo {
  double lambda = 0.0;
  double lambda1 = 0.0;  ///< principal eigenvalue of the species' ball
  int newton_iterations = 0;
  double residual = 0.0;
  double max_value = 0.0;
};

struct RunSummary {
  std::vector<std::string> completed;
  std::optional<std::string> failed_stage;
  std::string error;
  std::vector<StageTiming> timings;

  DomainPtr domain;
  std::vector<SpeciesParams> species;
  std::vector<BaselineInfo> baselines;
  std::vector<NDReport> nd;
  ModelKind model;
  std::optional<ContinuationTrace> trace;
  std::optional<UniquenessReport> uniqueness;

  bool ok() const noexcept { return !failed_stage.has_value(); }
};

/// Decimal form of kappa used in artifact names: shortest round-trip text.
inline std::string kappa_label(double kappa) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, kappa);
  return std::string(buf, res.ptr);
}

inline nlohmann::json step_to_json(const ContinuationStep& s) {
  const FreeBoundary fb = free_boundary(s.state);
  return {{"kappa", s.kappa},
          {"newton_iterations", s.newton_iterations},
          {"residual", s.residual},
          {"max_overlap", max_offdiagonal(s.diagnostics.overlap_matrix)},
          {"free_boundary_edges", fb.size()},
          {"diagnostics", s.diagnostics}};
}

/// Deterministic part of the summary; wall-clock timings are kept apart.
inline nlohmann::json summary_to_json(const RunSummary& s) {
  using nlohmann::json;
  json j;
  j["status"] = s.ok() ? "ok" : "failed";
  j["failed_stage"] = s.failed_stage ? json(*s.failed_stage) : json(nullptr);
  j["error"] = s.failed_stage ? json(s.error) : json(nullptr);
  j["completed_stages"] = s.completed;
  j["model"] = {{"kind", std::string(to_string(s.model.kind))}, {"truncation", s.model.truncated()}};
  if (s.domain)
    j["grid"] = {{"nx", s.domain->nx()}, {"ny", s.domain->ny()}, {"h", s.domain->h()},
                 {"interior_nodes", s.domain->interior_count()}};
  json baselines = json::array();
  for (std::size_t i = 0; i < s.baselines.size(); ++i) {
    const auto& b = s.baselines[i];
    baselines.push_back({{"species", i},
                         {"lambda", b.lambda},
                         {"lambda1", b.lambda1},
                         {"p", s.species.size() > i ? s.species[i].p : 0.0},
                         {"newton_iterations", b.newton_iterations},
                         {"residual", b.residual},
                         {"max", b.max_value}});
  }
  j["baselines"] = baselines;
  j["nd_margins"] = s.nd;
  if (s.trace) {
    json steps = json::array();
    for (const auto& st : s.trace->steps) steps.push_back(step_to_json(st));
    json failure = nullptr;
    if (s.trace->failure)
      failure = {{"kappa", s.trace->failure->kappa},
                 {"message", s.trace->failure->message},
                 {"residual_history", s.trace->failure->residual_history}};
    j["continuation"] = {{"steps", steps}, {"failure", failure}};
  } else {
    j["continuation"] = nullptr;
  }
  j["uniqueness"] = s.uniqueness ? json(*s.uniqueness) : json(nullptr);
  return j;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

inline void emit_state(const StateField& U, const std::filesystem::path& dir, const std::string& suffix,
                       const OutputConfig& out) {
  for (std::size_t i = 0; i < U.k(); ++i) {
    const std::string stem = "u" + std::to_string(i) + "_" + suffix;
    if (out.emit_fields) emit_field(U[i], (dir / (stem + ".csv")).string());
    if (out.emit_images) emit_image(U[i], (dir / (stem + ".pgm")).string());
  }
}

}  // namespace detail

/// Writes summary.json (always), timings.json, and, for the stages that ran,
/// baseline fields and per-kappa traces and fields.
inline void write_artifacts(const RunSummary& s, const OutputConfig& out) {
  namespace fs = std::filesystem;
  const fs::path dir(out.directory);
  fs::create_directories(dir);
  detail::write_text(dir / "summary.json", summary_to_json(s).dump(2) + "\n");
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& t : s.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  detail::write_text(dir / "timings.json", timings.dump(2) + "\n");
  if (!s.model.baseline.empty()) detail::emit_state(s.model.baseline, dir, "baseline", out);
  if (out.emit_fields)
    for (std::size_t i = 0; i < s.model.caps.size(); ++i)
      emit_field(s.model.caps[i], (dir / ("phi" + std::to_string(i) + ".csv")).string());
  if (s.trace) {
    for (const auto& st : s.trace->steps) {
      const std::string label = kappa_label(st.kappa);
      detail::write_text(dir / ("trace_" + label + ".json"), step_to_json(st).dump(2) + "\n");
      detail::emit_state(st.state, dir, label, out);
    }
  }
}

/// Runs the pipeline up to `mode` and writes all artifacts. Never throws for
/// a stage failure: the failing stage and message are recorded instead.
inline RunSummary run(const RunConfig& config, RunMode mode = RunMode::continuation) {
  RunSummary s;
  s.model.kind = config.model.kind;
  const SolverOptions& opts = config.solver;

  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    if (s.failed_stage) return;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
      s.completed.push_back(name);
    } catch (const std::exception& e) {
      s.failed_stage = name;
      s.error = e.what();
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    s.timings.push_back({name, dt.count()});
  };

  // Artifacts are written even after a failure so partial results survive.
  auto finish = [&] {
    try {
      write_artifacts(s, config.output);
      if (!s.failed_stage) s.completed.push_back("output");
    } catch (const std::exception& e) {
      if (!s.failed_stage) {
        s.failed_stage = "output";
        s.error = e.what();
      }
    }
  };

  stage("domain", [&] {
    validate(config);
    s.domain = build_domain(config.domain.balls, config.domain.corridors, config.domain.box(), config.domain.spacing());
  });

  stage("baseline", [&] {
    const std::size_t k = config.species.size();
    std::vector<ScalarField> parts;
    for (std::size_t i = 0; i < k; ++i) {
      const DomainPtr region = s.domain->ball_region(static_cast<int>(i));
      const EigenPair ground = principal_eigenvalue(region, opts);
      const auto& sc = config.species[i];
      SpeciesParams sp{sc.lambda ? *sc.lambda : *sc.lambda_over_lambda1 * ground.value, sc.p};
      s.species.push_back(sp);
      BaselineInfo info{sp.lambda, ground.value, 0, 0.0, 0.0};
      if (!(sp.lambda > ground.value))
        throw BaselineUnavailable("no positive baseline for species " + std::to_string(i) + ": lambda = " +
                                  format_double(sp.lambda) + " <= lambda1 = " + format_double(ground.value));
      const ScalarSolveReport rep = solve_ball(sp, region, positive_seed(region), opts);
      if (!rep.positive) throw BaselineUnavailable("no positive baseline for species " + std::to_string(i));
      info.newton_iterations = rep.newton_iterations;
      info.residual = rep.final_residual;
      info.max_value = rep.solution.max_abs();
      s.baselines.push_back(info);
      parts.push_back(rep.solution.on_domain(s.domain));
    }
    s.model.baseline = StateField(std::move(parts));
  });
  if (mode == RunMode::solve_baseline) {
    finish();
    return s;
  }

  stage("nd", [&] {
    for (std::size_t i = 0; i < s.species.size(); ++i) {
      const DomainPtr region = s.domain->ball_region(static_cast<int>(i));
      s.nd.push_back(nd_margin(s.model.baseline[i], s.species[i], region, opts));
      if (!(s.nd.back().margin > 0.0))
        throw NDFailure("nondegeneracy margin " + format_double(s.nd.back().margin) + " <= 0 for species " +
                        std::to_string(i));
    }
  });
  if (mode == RunMode::nd_check) {
    finish();
    return s;
  }

  if (config.model.truncation) {
    stage("phi", [&] {
      for (const auto& sp : s.species) s.model.caps.push_back(supersolution_phi(sp, s.domain, opts));
    });
  }

  stage("continuation", [&] {
    s.trace = continuation_run(s.species, s.model, config.schedule, opts);
    if (!s.trace->complete())
      throw NonlinearSolveError("continuation stopped at kappa = " + kappa_label(s.trace->failure->kappa) + ": " +
                                    s.trace->failure->message,
                                s.trace->failure->residual_history);
  });

  const bool probe = mode == RunMode::probe_uniqueness || config.probes.uniqueness.has_value();
  if (probe) {
    stage("uniqueness", [&] {
      const UniquenessConfig u = config.probes.uniqueness.value_or(UniquenessConfig{});
      const ContinuationStep& last = s.trace->steps.back();
      s.uniqueness = uniqueness_probe(s.species, s.model, last.kappa, last.state, u.delta, u.trials, u.seed, opts);
      if (!s.uniqueness->all_converged) throw NonlinearSolveError("uniqueness trials failed to converge", {});
    });
  }

  finish();
  return s;
}

struct ConvergenceLevel {
  double h = 0.0;
  double l2_error = 0.0;
};

/// Manufactured-solution study of the five-point Laplacian on the unit
/// square: u = sin(pi x) sin(pi y), -Lap u = 2 pi^2 u, one level per 1/n.
inline std::vector<ConvergenceLevel> convergence_study(const std::vector<int>& resolutions,
                                                       const SolverOptions& opts = {}) {
  using std::numbers::pi;
  std::vector<ConvergenceLevel> out;
  for (int n : resolutions) {
    if (n < 2) throw std::invalid_argument("convergence study needs at least two cells per side");
    const double h = 1.0 / n;
    const DomainPtr square = GridDomain::rectangle({0.0, 0.0, 1.0, 1.0}, h);
    auto exact = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    const ScalarField rhs =
        ScalarField::from_function(square, [&](double x, double y) { return 2.0 * pi * pi * exact(x, y); });
    LinearSolveOptions lin = opts.linear();
    lin.tol = std::min(lin.tol, 1e-12);
    const ScalarField u = solve_spd(rhs, nullptr, lin);
    const ScalarField err = u - ScalarField::from_function(square, exact);
    out.push_back({h, norm(err, NormKind::L2)});
  }
  return out;
}

inline nlohmann::json convergence_to_json(const std::vector<ConvergenceLevel>& levels) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    nlohmann::json row = {{"h", levels[i].h}, {"l2_error", levels[i].l2_error}};
    row["ratio"] = i == 0 ? nlohmann::json(nullptr) : nlohmann::json(levels[i - 1].l2_error / levels[i].l2_error);
    rows.push_back(row);
  }
  return {{"manufactured", "sin(pi x) sin(pi y) on the unit square"}, {"levels", rows}};
}

}  // namespace segregation
