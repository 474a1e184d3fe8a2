#pragma once

// Multistart probe: perturb a converged state inside a small H1 ball, re-solve
// each perturbation and measure how far apart the results land.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "diagnostics.hpp"
#include "system_solver.hpp"

namespace segregation {

struct UniquenessReport {
  int trials = 0;
  double max_pairwise_h1_distance = 0.0;
  bool all_converged = true;
  double max_distance_to_center = 0.0;
  std::vector<int> iterations;  ///< Newton iterations per trial, -1 when it failed
};

/// Smooth random state with total H1 norm `size`: uniform nodal noise in
/// [-1, 1] passed through one Dirichlet solve, then rescaled.
inline StateField smooth_perturbation(const DomainPtr& domain, std::size_t k, double size, std::uint64_t seed,
                                      const SolverOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<ScalarField> parts;
  parts.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    ScalarField raw(domain);
    auto& v = raw.mutable_values();
    for (std::size_t p = 0; p < domain->size(); ++p) {
      const double sample = noise(rng);
      if (domain->interior(p)) v[p] = sample;
    }
    parts.push_back(solve_spd(raw, nullptr, opts.linear()));
  }
  StateField out(std::move(parts));
  const double n = h1_norm(out);
  if (size == 0.0 || n == 0.0) return StateField::zeros(domain, k);
  out *= size / n;
  return out;
}

/// Re-solves `trials` perturbations of `center` (H1 size `delta`, seeds
/// seed + t) at kappa_final. Failed trials are flagged, not fatal.
inline UniquenessReport uniqueness_probe(const std::vector<SpeciesParams>& species, const ModelKind& model,
                                         double kappa_final, const StateField& center, double delta, int trials,
                                         std::uint64_t seed, const SolverOptions& opts = {}) {
  if (!(delta >= 0.0)) throw std::invalid_argument("uniqueness delta must be nonnegative");
  if (trials < 1) throw std::invalid_argument("uniqueness probe needs at least one trial");
  UniquenessReport report;
  report.trials = trials;
  std::vector<StateField> results;
  for (int t = 0; t < trials; ++t) {
    StateField start = center + smooth_perturbation(center.domain_ptr(), center.k(), delta,
                                                    seed + static_cast<std::uint64_t>(t), opts);
    try {
      SystemSolveResult res = solve_system(start, species, model, kappa_final, opts.newton_tol, opts);
      report.iterations.push_back(res.iterations);
      report.max_distance_to_center = std::max(report.max_distance_to_center, h1_distance(res.state, center));
      results.push_back(std::move(res.state));
    } catch (const NonlinearSolveError&) {
      report.all_converged = false;
      report.iterations.push_back(-1);
    } catch (const LinearSolveError&) {
      report.all_converged = false;
      report.iterations.push_back(-1);
    }
  }
  for (std::size_t a = 0; a < results.size(); ++a)
    for (std::size_t b = a + 1; b < results.size(); ++b)
      report.max_pairwise_h1_distance = std::max(report.max_pairwise_h1_distance, h1_distance(results[a], results[b]));
  return report;
}

}  // namespace segregation
