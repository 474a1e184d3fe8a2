#pragma once

// Run configuration: a JSON document with the sections domain, species,
// model, schedule, solver, probes and output. Every key except the domain's
// balls has a default; unknown keys are rejected so typos surface early.

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid_domain.hpp"
#include "model.hpp"
#include "solver_options.hpp"
#include "system_solver.hpp"

namespace segregation {

struct DomainConfig {
  std::optional<BoundingBox> bbox;  ///< derived from the balls when absent
  std::optional<double> h;          ///< smallest radius / 32 when absent
  std::vector<BallSpec> balls;
  std::vector<CorridorSpec> corridors;

  double spacing() const {
    if (h) return *h;
    double r = balls.front().radius;
    for (const auto& b : balls) r = std::min(r, b.radius);
    return r / 32.0;
  }

  BoundingBox box() const {
    if (bbox) return *bbox;
    double rmax = 0.0;
    BoundingBox out{balls.front().center.x, balls.front().center.y, balls.front().center.x,
                    balls.front().center.y};
    for (const auto& b : balls) {
      out.x_min = std::min(out.x_min, b.center.x - b.radius);
      out.y_min = std::min(out.y_min, b.center.y - b.radius);
      out.x_max = std::max(out.x_max, b.center.x + b.radius);
      out.y_max = std::max(out.y_max, b.center.y + b.radius);
      rmax = std::max(rmax, b.radius);
    }
    const double pad = std::max(0.25 * rmax, 4.0 * spacing());
    return {out.x_min - pad, out.y_min - pad, out.x_max + pad, out.y_max + pad};
  }
};

/// Either an absolute lambda or a multiple of the principal eigenvalue of
/// the species' own ball (resolved once the grid exists).
struct SpeciesConfig {
  std::optional<double> lambda;
  std::optional<double> lambda_over_lambda1;
  double p = 2.0;
};

struct ModelConfig {
  Model kind = Model::barrier;
  bool truncation = false;
};

struct UniquenessConfig {
  double delta = 0.02;
  int trials = 10;
  std::uint64_t seed = 0;
};

struct ProbesConfig {
  std::optional<UniquenessConfig> uniqueness;
};

struct OutputConfig {
  std::string directory = "output";
  bool emit_fields = true;
  bool emit_images = false;
};

struct RunConfig {
  DomainConfig domain;
  std::vector<SpeciesConfig> species;
  ModelConfig model;
  ContinuationSchedule schedule;
  SolverOptions solver;
  ProbesConfig probes;
  OutputConfig output;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("field '" + where + "': expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("field '" + where + "." + it.key() + "': unknown key");
}

template <class T>
T read_value(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + where + "': " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, const std::string& where, T& out) {
  if (j.contains(key)) out = read_value<T>(j.at(key), where + "." + key);
}

inline Point read_point(const json& j, const std::string& where) {
  const auto v = read_value<std::vector<double>>(j, where);
  if (v.size() != 2) throw ConfigError("field '" + where + "': expected [x, y]");
  return {v[0], v[1]};
}

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("field '" + field + "': " + what);
}

}  // namespace detail

/// Semantic checks shared by parsing and programmatic construction.
inline void validate(const RunConfig& c) {
  using detail::require;
  require(!c.domain.balls.empty(), "domain.balls", "at least one ball is required");
  require(c.species.size() == c.domain.balls.size(), "species",
          "species count (" + std::to_string(c.species.size()) + ") must equal ball count (" +
              std::to_string(c.domain.balls.size()) + ")");
  std::vector<int> seen(c.domain.balls.size(), 0);
  for (std::size_t i = 0; i < c.domain.balls.size(); ++i) {
    const std::string f = "domain.balls[" + std::to_string(i) + "]";
    require(c.domain.balls[i].radius > 0.0, f + ".radius", "must be > 0");
    const int s = c.domain.balls[i].species_index;
    require(s >= 0 && static_cast<std::size_t>(s) < seen.size() && !seen[static_cast<std::size_t>(s)],
            f + ".species", "species indices must be a permutation of 0..k-1");
    seen[static_cast<std::size_t>(s)] = 1;
  }
  if (c.domain.h) require(*c.domain.h > 0.0, "domain.h", "must be > 0");
  for (std::size_t i = 0; i < c.species.size(); ++i) {
    const auto& s = c.species[i];
    const std::string f = "species[" + std::to_string(i) + "]";
    require(s.lambda.has_value() != s.lambda_over_lambda1.has_value(), f,
            "give exactly one of 'lambda' and 'lambda_over_lambda1'");
    if (s.lambda) require(*s.lambda > 0.0, f + ".lambda", "must be > 0");
    if (s.lambda_over_lambda1) require(*s.lambda_over_lambda1 > 0.0, f + ".lambda_over_lambda1", "must be > 0");
    require(s.p > 1.0, f + ".p", "must be > 1");
  }
  require(c.schedule.kappa_start >= 0.0, "schedule.kappa_start", "must be >= 0");
  require(c.schedule.factor > 1.0, "schedule.factor", "must be > 1");
  require(c.schedule.steps >= 1, "schedule.steps", "must be >= 1");
  require(c.schedule.kappa_start > 0.0 || c.schedule.steps == 1, "schedule.kappa_start",
          "must be > 0 when steps > 1");
  require(c.solver.newton_tol > 0.0, "solver.newton_tol", "must be > 0");
  require(c.solver.cg_tol > 0.0, "solver.cg_tol", "must be > 0");
  require(c.solver.eig_tol > 0.0, "solver.eig_tol", "must be > 0");
  require(c.solver.max_newton >= 1, "solver.max_newton", "must be >= 1");
  require(c.solver.max_backtracks >= 0, "solver.max_backtracks", "must be >= 0");
  if (c.probes.uniqueness) {
    require(c.probes.uniqueness->delta >= 0.0, "probes.uniqueness.delta", "must be >= 0");
    require(c.probes.uniqueness->trials >= 1, "probes.uniqueness.trials", "must be >= 1");
  }
  require(!c.output.directory.empty(), "output.directory", "must not be empty");
}

inline RunConfig parse_config(const std::string& text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    const auto last_nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const std::size_t column = last_nl == std::string::npos ? upto + 1 : upto - last_nl;
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  detail::reject_unknown(root, "config", {"domain", "species", "model", "schedule", "solver", "probes", "output"});

  RunConfig c;
  if (!root.contains("domain")) throw ConfigError("field 'domain': missing");
  const json& dom = root.at("domain");
  detail::reject_unknown(dom, "domain", {"bbox", "h", "balls", "corridors"});
  if (dom.contains("bbox")) {
    const auto v = detail::read_value<std::vector<double>>(dom.at("bbox"), "domain.bbox");
    if (v.size() != 4) throw ConfigError("field 'domain.bbox': expected [x_min, y_min, x_max, y_max]");
    c.domain.bbox = BoundingBox{v[0], v[1], v[2], v[3]};
  }
  if (dom.contains("h")) c.domain.h = detail::read_value<double>(dom.at("h"), "domain.h");
  if (!dom.contains("balls") || !dom.at("balls").is_array()) throw ConfigError("field 'domain.balls': missing");
  int index = 0;
  for (const auto& b : dom.at("balls")) {
    const std::string where = "domain.balls[" + std::to_string(index) + "]";
    detail::reject_unknown(b, where, {"center", "radius", "species"});
    BallSpec spec;
    if (!b.contains("center")) throw ConfigError("field '" + where + ".center': missing");
    spec.center = detail::read_point(b.at("center"), where + ".center");
    if (!b.contains("radius")) throw ConfigError("field '" + where + ".radius': missing");
    spec.radius = detail::read_value<double>(b.at("radius"), where + ".radius");
    spec.species_index = index;
    detail::read_optional(b, "species", where, spec.species_index);
    c.domain.balls.push_back(spec);
    ++index;
  }
  if (dom.contains("corridors")) {
    index = 0;
    for (const auto& cj : dom.at("corridors")) {
      const std::string where = "domain.corridors[" + std::to_string(index++) + "]";
      detail::reject_unknown(cj, where, {"from", "to", "width"});
      CorridorSpec spec;
      for (const char* key : {"from", "to", "width"})
        if (!cj.contains(key)) throw ConfigError("field '" + where + "." + key + "': missing");
      spec.from_ball = detail::read_value<int>(cj.at("from"), where + ".from");
      spec.to_ball = detail::read_value<int>(cj.at("to"), where + ".to");
      spec.width = detail::read_value<double>(cj.at("width"), where + ".width");
      c.domain.corridors.push_back(spec);
    }
  }

  if (root.contains("species")) {
    index = 0;
    for (const auto& s : root.at("species")) {
      const std::string where = "species[" + std::to_string(index++) + "]";
      detail::reject_unknown(s, where, {"lambda", "lambda_over_lambda1", "p"});
      SpeciesConfig sc;
      if (s.contains("lambda")) sc.lambda = detail::read_value<double>(s.at("lambda"), where + ".lambda");
      if (s.contains("lambda_over_lambda1"))
        sc.lambda_over_lambda1 = detail::read_value<double>(s.at("lambda_over_lambda1"), where + ".lambda_over_lambda1");
      detail::read_optional(s, "p", where, sc.p);
      c.species.push_back(sc);
    }
  }

  if (root.contains("model")) {
    const json& m = root.at("model");
    detail::reject_unknown(m, "model", {"kind", "truncation"});
    if (m.contains("kind")) {
      try {
        c.model.kind = model_from_string(detail::read_value<std::string>(m.at("kind"), "model.kind"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field 'model.kind': ") + e.what());
      }
    }
    detail::read_optional(m, "truncation", "model", c.model.truncation);
  }

  if (root.contains("schedule")) {
    const json& s = root.at("schedule");
    detail::reject_unknown(s, "schedule", {"kappa_start", "factor", "steps"});
    detail::read_optional(s, "kappa_start", "schedule", c.schedule.kappa_start);
    detail::read_optional(s, "factor", "schedule", c.schedule.factor);
    detail::read_optional(s, "steps", "schedule", c.schedule.steps);
  }

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    detail::reject_unknown(s, "solver",
                           {"newton_tol", "cg_tol", "eig_tol", "max_newton", "max_backtracks", "gauss_seidel_sweeps"});
    detail::read_optional(s, "newton_tol", "solver", c.solver.newton_tol);
    detail::read_optional(s, "cg_tol", "solver", c.solver.cg_tol);
    detail::read_optional(s, "eig_tol", "solver", c.solver.eig_tol);
    detail::read_optional(s, "max_newton", "solver", c.solver.max_newton);
    detail::read_optional(s, "max_backtracks", "solver", c.solver.max_backtracks);
    detail::read_optional(s, "gauss_seidel_sweeps", "solver", c.solver.gauss_seidel_sweeps);
  }

  if (root.contains("probes")) {
    const json& p = root.at("probes");
    detail::reject_unknown(p, "probes", {"uniqueness"});
    if (p.contains("uniqueness")) {
      const json& u = p.at("uniqueness");
      detail::reject_unknown(u, "probes.uniqueness", {"delta", "trials", "seed"});
      UniquenessConfig uc;
      detail::read_optional(u, "delta", "probes.uniqueness", uc.delta);
      detail::read_optional(u, "trials", "probes.uniqueness", uc.trials);
      detail::read_optional(u, "seed", "probes.uniqueness", uc.seed);
      c.probes.uniqueness = uc;
    }
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    detail::reject_unknown(o, "output", {"directory", "emit_fields", "emit_images"});
    detail::read_optional(o, "directory", "output", c.output.directory);
    detail::read_optional(o, "emit_fields", "output", c.output.emit_fields);
    detail::read_optional(o, "emit_images", "output", c.output.emit_images);
  }

  if (!root.contains("species")) c.species.assign(c.domain.balls.size(), SpeciesConfig{std::nullopt, 2.0, 2.0});
  validate(c);
  return c;
}

}  // namespace segregation
