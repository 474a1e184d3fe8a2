#pragma once

// Single-species Dirichlet problems: the positive logistic state on a region,
// the principal eigenpair, the nondegeneracy margin of a state and the
// whole-domain supersolution used to cap the reaction.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "discrete_ops.hpp"
#include "reaction.hpp"
#include "solver_options.hpp"
#include "sparse_assembly.hpp"

namespace segregation {

struct ScalarSolveReport {
  ScalarField solution;
  int newton_iterations = 0;
  double final_residual = 0.0;
  bool positive = false;
};

struct EigenPair {
  double value = 0.0;
  ScalarField eigenfield;
  int iterations = 0;
};

struct NDReport {
  double margin = 0.0;
  int rayleigh_iterations = 0;
  double nu_max = 0.0;  ///< top eigenvalue of w -> A^{-1}(f'(u0) w)
  double shift = 0.0;
};

namespace detail {

inline ScalarField scalar_residual(const SpeciesParams& sp, const ScalarField& u) {
  ScalarField r = apply_laplacian(u);
  auto& rv = r.mutable_values();
  const auto& d = u.domain();
  for (std::size_t p = 0; p < d.size(); ++p)
    if (d.interior(p)) rv[p] -= f_eval(sp, u[p]);
  return r;
}

/// Solves (A - diag(fp)) w = rhs. First tries the splitting
/// (A + D-) w_{m+1} = rhs + D+ w_m with CG inner solves; when that does not
/// contract, falls back to a sparse direct factorization.
inline ScalarField solve_linearized(const ScalarField& rhs, const std::vector<double>& fp,
                                    const SolverOptions& opts) {
  const auto& d = rhs.domain();
  ScalarField shift(rhs.domain_ptr());
  ScalarField gain(rhs.domain_ptr());
  bool indefinite = false;
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (!d.interior(p)) continue;
    shift.mutable_values()[p] = std::max(0.0, -fp[p]);
    gain.mutable_values()[p] = std::max(0.0, fp[p]);
    indefinite = indefinite || fp[p] > 0.0;
  }
  if (!indefinite) return solve_spd(rhs, &shift, opts.linear(), nullptr);

  const double rhs_norm = norm(rhs, NormKind::L2);
  if (rhs_norm == 0.0) return ScalarField(rhs.domain_ptr());
  auto defect = [&](const ScalarField& w) {
    ScalarField r = apply_laplacian(w);
    auto& rv = r.mutable_values();
    for (std::size_t p = 0; p < d.size(); ++p)
      if (d.interior(p)) rv[p] -= fp[p] * w[p] + rhs[p];
    return norm(r, NormKind::L2) / rhs_norm;
  };

  const double target = std::max(10.0 * opts.cg_tol, 1e-12);
  ScalarField w(rhs.domain_ptr());
  double previous = 1.0;
  for (int sweep = 0; sweep < 30; ++sweep) {
    ScalarField source = rhs;
    auto& sv = source.mutable_values();
    for (std::size_t p = 0; p < d.size(); ++p) sv[p] += gain[p] * w[p];
    w = solve_spd(source, &shift, opts.linear(), &w);
    const double current = defect(w);
    if (current <= target) return w;
    if (sweep >= 2 && current > 0.9 * previous) break;
    previous = current;
  }

  InteriorIndex ix(d);
  std::vector<Triplet> t;
  t.reserve(ix.size() * 5);
  add_laplacian(d, ix, 1, t);
  Eigen::VectorXd b(static_cast<Eigen::Index>(ix.size()));
  for (std::size_t n = 0; n < ix.size(); ++n) {
    const auto p = ix.nodes[n];
    t.emplace_back(static_cast<int>(n), static_cast<int>(n), -fp[p]);
    b[static_cast<Eigen::Index>(n)] = rhs[p];
  }
  SparseMatrix m(static_cast<Eigen::Index>(ix.size()), static_cast<Eigen::Index>(ix.size()));
  m.setFromTriplets(t.begin(), t.end());
  DirectSolver lu;
  lu.factorize(m);
  const Eigen::VectorXd x = lu.solve(b);
  ScalarField out(rhs.domain_ptr());
  for (std::size_t n = 0; n < ix.size(); ++n) out.mutable_values()[ix.nodes[n]] = x[static_cast<Eigen::Index>(n)];
  return out;
}

}  // namespace detail

/// Damped Newton for -Lap u = f(u) on `region` with zero boundary data.
/// Converged when ||A u - f(u)||_L2 <= newton_tol * max(1, ||f(u)||_L2).
inline ScalarSolveReport solve_ball(const SpeciesParams& sp, const DomainPtr& region,
                                    const ScalarField& guess, const SolverOptions& opts = {}) {
  sp.validate();
  ScalarField u = guess.on_domain(region);
  const auto& d = *region;
  std::vector<double> history;
  std::vector<double> fp(d.size(), 0.0);

  auto measure = [&](const ScalarField& v, double& scale) {
    const ScalarField r = detail::scalar_residual(sp, v);
    scale = std::max(1.0, norm(reaction_field(sp, v), NormKind::L2));
    return std::pair{r, norm(r, NormKind::L2)};
  };

  double scale = 1.0;
  auto [residual, res_norm] = measure(u, scale);
  history.push_back(res_norm);
  int it = 0;
  while (res_norm > opts.newton_tol * scale) {
    if (it >= opts.max_newton)
      throw NonlinearSolveError("scalar Newton reached the iteration limit", history);
    ++it;
    for (std::size_t p = 0; p < d.size(); ++p) fp[p] = d.interior(p) ? f_prime(sp, u[p]) : 0.0;
    const ScalarField step = detail::solve_linearized(-residual, fp, opts);

    double t = 1.0;
    bool accepted = false;
    for (int b = 0; b <= opts.max_backtracks; ++b, t *= 0.5) {
      ScalarField trial = u;
      trial.axpy(t, step);
      double trial_scale = 1.0;
      auto [trial_res, trial_norm] = measure(trial, trial_scale);
      if (trial_norm <= (1.0 - 1e-4 * t) * res_norm) {
        u = std::move(trial);
        residual = std::move(trial_res);
        res_norm = trial_norm;
        scale = trial_scale;
        accepted = true;
        break;
      }
    }
    history.push_back(res_norm);
    if (!accepted) throw NonlinearSolveError("scalar Newton line search failed", history);
  }

  if (u.max_abs() <= opts.newton_tol) {
    u = ScalarField(region);
    res_norm = 0.0;
  }
  bool positive = d.interior_count() > 0;
  for (std::size_t p = 0; p < d.size(); ++p)
    if (d.interior(p) && !(u[p] > 0.0)) positive = false;
  return {std::move(u), it, res_norm, positive};
}

/// Smallest eigenvalue of the Dirichlet Laplacian on `region` by inverse
/// iteration. The eigenfield is nonnegative with unit L2 norm.
inline EigenPair principal_eigenvalue(const DomainPtr& region, const SolverOptions& opts = {}) {
  const auto& d = *region;
  if (d.interior_count() == 0) throw EigenSolveError("principal_eigenvalue: empty region");
  ScalarField w = ScalarField::constant(region, 1.0);
  w *= 1.0 / norm(w, NormKind::L2);
  double lambda = inner(w, apply_laplacian(w));
  LinearSolveOptions lin = opts.linear();
  lin.tol = std::min(lin.tol, 1e-3 * opts.eig_tol);

  constexpr int max_iterations = 5000;
  for (int it = 1; it <= max_iterations; ++it) {
    // Warm start: w / lambda is the exact answer once w is an eigenvector.
    ScalarField guess = (1.0 / lambda) * w;
    ScalarField z = solve_spd(w, nullptr, lin, &guess);
    z *= 1.0 / norm(z, NormKind::L2);
    const ScalarField az = apply_laplacian(z);
    const double next = inner(z, az);
    ScalarField defect = az;
    defect.axpy(-next, z);
    const double change = std::abs(next - lambda);
    w = std::move(z);
    lambda = next;
    // Near-degenerate clusters (thin corridors) never reach the residual
    // test; there the Rayleigh quotient settles far below eig_tol.
    if (norm(defect, NormKind::L2) <= opts.eig_tol * lambda || change <= 1e-4 * opts.eig_tol * lambda) {
      double sum = 0.0;
      for (double v : w.values()) sum += v;
      if (sum < 0.0) w *= -1.0;
      for (auto& v : w.mutable_values()) v = std::max(v, 0.0);
      w *= 1.0 / norm(w, NormKind::L2);
      return {lambda, std::move(w), it};
    }
  }
  throw EigenSolveError("inverse iteration stagnated");
}

/// Initial guess selecting the positive branch: the constant 1 on the
/// region. It is a supersolution since f(1) = 0, so Newton heads for the
/// maximal solution instead of the trivial one.
inline ScalarField positive_seed(const DomainPtr& region) { return ScalarField::constant(region, 1.0); }

/// Margin of the coercivity condition
///   int |grad w|^2 - f'(u0) w^2 >= margin * int |grad w|^2  on H^1_0(region),
/// i.e. 1 - nu_max with nu_max the top eigenvalue of T w = A^{-1}(f'(u0) w),
/// which is self-adjoint in the energy inner product. Power iteration runs on
/// T + sigma with sigma = ||max(0, -f'(u0))||_inf / lambda_1(region) so the
/// dominant eigenvalue is nu_max + sigma.
inline NDReport nd_margin(const ScalarField& u0, const SpeciesParams& sp, const DomainPtr& region,
                          const SolverOptions& opts = {}) {
  const auto& d = *region;
  const EigenPair ground = principal_eigenvalue(region, opts);
  const ScalarField base = u0.on_domain(region);
  std::vector<double> fp(d.size(), 0.0);
  double negative_part = 0.0;
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (!d.interior(p)) continue;
    fp[p] = f_prime(sp, base[p]);
    negative_part = std::max(negative_part, -fp[p]);
  }
  const double sigma = negative_part / ground.value;

  auto weighted = [&](const ScalarField& w) {
    ScalarField out(region);
    for (std::size_t p = 0; p < d.size(); ++p) out.mutable_values()[p] = fp[p] * w[p];
    return out;
  };
  auto energy_normalize = [](ScalarField& w) { w *= 1.0 / std::sqrt(inner(w, apply_laplacian(w))); };

  LinearSolveOptions lin = opts.linear();
  lin.tol = std::min(lin.tol, 1e-3 * opts.eig_tol);

  ScalarField w = ground.eigenfield;
  energy_normalize(w);
  double nu = inner(w, weighted(w));
  constexpr int max_iterations = 20000;
  for (int it = 1; it <= max_iterations; ++it) {
    ScalarField z = solve_spd(weighted(w), nullptr, lin, nullptr);
    z.axpy(sigma, w);
    energy_normalize(z);
    const double next = inner(z, weighted(z));
    const double change = std::abs(next - nu);
    w = std::move(z);
    nu = next;
    if (change <= opts.eig_tol * std::max(1.0, std::abs(nu))) return {1.0 - nu, it, nu, sigma};
  }
  throw EigenSolveError("nondegeneracy power iteration stagnated");
}

/// Positive solution of -Lap phi = f(phi) on the whole domain.
inline ScalarField supersolution_phi(const SpeciesParams& sp, const DomainPtr& domain,
                                     const SolverOptions& opts = {}) {
  sp.validate();
  const EigenPair ground = principal_eigenvalue(domain, opts);
  if (!(sp.lambda > ground.value))
    throw PhiUnavailable("lambda = " + std::to_string(sp.lambda) +
                         " does not exceed the principal eigenvalue " + std::to_string(ground.value));
  ScalarSolveReport report = solve_ball(sp, domain, positive_seed(domain), opts);
  if (!report.positive)
    throw NonlinearSolveError("supersolution solve did not stay positive", {report.final_residual});
  return std::move(report.solution);
}

}  // namespace segregation
