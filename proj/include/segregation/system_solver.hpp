#pragma once

// Coupled k-species solves at fixed competition strength and the geometric
// continuation in kappa that approaches the segregated limit.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "model.hpp"
#include "solver_options.hpp"
#include "sparse_assembly.hpp"
#include "state_field.hpp"

namespace segregation {

struct SystemSolveResult {
  StateField state;
  int iterations = 0;
  double residual = 0.0;  ///< root-sum-square of component L2 residual norms
  std::vector<double> history;
  int gauss_seidel_sweeps = 0;
};

namespace detail {

/// Node-major packed representation of a k-species system on the interior
/// nodes: unknown (n, i) is entry n * k + i.
class PackedSystem {
public:
  PackedSystem(const std::vector<SpeciesParams>& species, const ModelKind& model, double kappa,
               const DomainPtr& domain)
      : species_(species), model_(model), kappa_(kappa), domain_(domain), index_(*domain),
        k_(static_cast<int>(species.size())) {
    if (k_ < 1 || k_ > LocalTerms::max_species)
      throw std::invalid_argument("species count must be between 1 and 16");
    for (const auto& sp : species) sp.validate();
    if (model.uses_baseline()) {
      if (model.baseline.k() != species.size())
        throw std::invalid_argument(std::string(to_string(model.kind)) + " model needs one baseline per species");
      if (!model.baseline.domain().same_grid(*domain))
        throw DomainMismatchError("baseline lives on a different grid");
    }
    if (model.truncated() && model.caps.size() != species.size())
      throw std::invalid_argument("truncation needs one cap per species");

    const std::size_t n = index_.size();
    base_.assign(n * k_, 0.0);
    if (model.truncated()) cap_.assign(n * k_, 0.0);
    neighbours_.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      const auto p = index_.nodes[m];
      const auto nb = domain->neighbours(p);
      for (int s = 0; s < 4; ++s) neighbours_[m][s] = index_.index[nb[s]];
      for (int i = 0; i < k_; ++i) {
        if (model.uses_baseline()) base_[m * k_ + i] = model.baseline[i][p];
        if (model.truncated()) cap_[m * k_ + i] = model.caps[i][p];
      }
    }
    inv_h2_ = 1.0 / (domain->h() * domain->h());
  }

  std::size_t nodes() const noexcept { return index_.size(); }
  int k() const noexcept { return k_; }
  double h() const noexcept { return domain_->h(); }

  Eigen::VectorXd pack(const StateField& U) const {
    if (U.k() != static_cast<std::size_t>(k_)) throw DomainMismatchError("state has the wrong species count");
    if (!U.domain().same_grid(*domain_)) throw DomainMismatchError("state lives on a different grid");
    Eigen::VectorXd x(static_cast<Eigen::Index>(nodes() * k_));
    for (std::size_t m = 0; m < nodes(); ++m)
      for (int i = 0; i < k_; ++i) x[static_cast<Eigen::Index>(m * k_ + i)] = U[i][index_.nodes[m]];
    return x;
  }

  StateField unpack(const Eigen::VectorXd& x) const {
    std::vector<ScalarField> c(static_cast<std::size_t>(k_), ScalarField(domain_));
    for (int i = 0; i < k_; ++i) {
      auto& v = c[i].mutable_values();
      for (std::size_t m = 0; m < nodes(); ++m) v[index_.nodes[m]] = x[static_cast<Eigen::Index>(m * k_ + i)];
    }
    return StateField(std::move(c));
  }

  /// A u - rhs(u). Also returns ||rhs|| in the discrete L2 sense.
  Eigen::VectorXd residual(const Eigen::VectorXd& x, double* rhs_norm = nullptr) const {
    Eigen::VectorXd r(x.size());
    LocalTerms t;
    double rhs_sq = 0.0;
    for (std::size_t m = 0; m < nodes(); ++m) {
      const double* u = x.data() + m * k_;
      local_terms(model_.kind, species_, kappa_, u, base_.data() + m * k_,
                  cap_.empty() ? nullptr : cap_.data() + m * k_, k_, t, false);
      for (int i = 0; i < k_; ++i) {
        double lap = 4.0 * u[i];
        for (int s = 0; s < 4; ++s) {
          const int q = neighbours_[m][s];
          if (q >= 0) lap -= x[static_cast<Eigen::Index>(q) * k_ + i];
        }
        r[static_cast<Eigen::Index>(m * k_ + i)] = lap * inv_h2_ - t.rhs[i];
        rhs_sq += t.rhs[i] * t.rhs[i];
      }
    }
    if (rhs_norm) *rhs_norm = h() * std::sqrt(rhs_sq);
    return r;
  }

  double l2(const Eigen::VectorXd& r) const { return h() * r.norm(); }

  /// Full block Jacobian. The sparsity pattern is independent of x.
  SparseMatrix jacobian(const Eigen::VectorXd& x) const {
    std::vector<Triplet> t;
    t.reserve(nodes() * static_cast<std::size_t>(k_) * (5 + k_));
    add_laplacian(*domain_, index_, k_, t);
    LocalTerms lt;
    for (std::size_t m = 0; m < nodes(); ++m) {
      local_terms(model_.kind, species_, kappa_, x.data() + m * k_, base_.data() + m * k_,
                  cap_.empty() ? nullptr : cap_.data() + m * k_, k_, lt, true);
      for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j)
          t.emplace_back(static_cast<int>(m) * k_ + i, static_cast<int>(m) * k_ + j, -lt.jac[i][j]);
    }
    const auto n = static_cast<Eigen::Index>(nodes() * k_);
    SparseMatrix J(n, n);
    J.setFromTriplets(t.begin(), t.end());
    return J;
  }

  /// A + diag(max(0, -d rhs_i / d u_i)) for species i: an M-matrix whose
  /// inverse drives the projected fixed-point sweep.
  SparseMatrix relaxation_block(const Eigen::VectorXd& x, int i) const {
    std::vector<Triplet> t;
    t.reserve(nodes() * 5);
    add_laplacian(*domain_, index_, 1, t);
    LocalTerms lt;
    for (std::size_t m = 0; m < nodes(); ++m) {
      local_terms(model_.kind, species_, kappa_, x.data() + m * k_, base_.data() + m * k_,
                  cap_.empty() ? nullptr : cap_.data() + m * k_, k_, lt, true);
      t.emplace_back(static_cast<int>(m), static_cast<int>(m), std::max(0.0, -lt.jac[i][i]));
    }
    const auto n = static_cast<Eigen::Index>(nodes());
    SparseMatrix P(n, n);
    P.setFromTriplets(t.begin(), t.end());
    return P;
  }

  /// Pointwise lower bound satisfied by every solution of the model:
  /// 0 for lotka_volterra, -u0 for positive_part, none for barrier.
  double lower_bound(std::size_t m, int i) const {
    switch (model_.kind) {
      case Model::lotka_volterra:
        return 0.0;
      case Model::positive_part:
        return -base_[m * k_ + i];
      case Model::barrier:
        break;
    }
    return -std::numeric_limits<double>::infinity();
  }

private:
  const std::vector<SpeciesParams>& species_;
  const ModelKind& model_;
  double kappa_;
  DomainPtr domain_;
  InteriorIndex index_;
  int k_;
  double inv_h2_ = 1.0;
  std::vector<double> base_;
  std::vector<double> cap_;
  std::vector<std::array<int, 4>> neighbours_;
};

}  // namespace detail

/// Component i = A u_i - RHS_i(U, kappa) for the selected model.
inline StateField residual(const StateField& U, const std::vector<SpeciesParams>& species,
                           const ModelKind& model, double kappa) {
  detail::PackedSystem sys(species, model, kappa, U.domain_ptr());
  return sys.unpack(sys.residual(sys.pack(U)));
}

inline double residual_norm(const StateField& R) {
  double s = 0.0;
  for (const auto& r : R) {
    const double n = norm(r, NormKind::L2);
    s += n * n;
  }
  return std::sqrt(s);
}

/// Damped semismooth Newton on the full block system. When backtracking
/// fails, up to `gauss_seidel_sweeps` projected species-by-species sweeps
/// run before Newton resumes. Converged when
/// ||residual|| <= tol * max(1, ||RHS||).
inline SystemSolveResult solve_system(const StateField& guess, const std::vector<SpeciesParams>& species,
                                      const ModelKind& model, double kappa, double tol,
                                      const SolverOptions& opts = {}) {
  detail::PackedSystem sys(species, model, kappa, guess.domain_ptr());
  Eigen::VectorXd x = sys.pack(guess);
  double rhs_norm = 0.0;
  Eigen::VectorXd r = sys.residual(x, &rhs_norm);
  double res = sys.l2(r);
  SystemSolveResult out;
  out.history.push_back(res);

  DirectSolver lu;
  auto converged = [&] { return res <= tol * std::max(1.0, rhs_norm); };

  // One accepted step along `dir` restricted to the entries it touches.
  auto line_search = [&](const Eigen::VectorXd& dir) {
    double t = 1.0;
    for (int b = 0; b <= opts.max_backtracks; ++b, t *= 0.5) {
      Eigen::VectorXd trial = x + t * dir;
      double trial_rhs = 0.0;
      Eigen::VectorXd trial_r = sys.residual(trial, &trial_rhs);
      const double trial_res = sys.l2(trial_r);
      if (trial_res <= (1.0 - 1e-4 * t) * res) {
        x = std::move(trial);
        r = std::move(trial_r);
        res = trial_res;
        rhs_norm = trial_rhs;
        return true;
      }
    }
    return false;
  };

  // Species-by-species projected fixed-point sweeps. Reports progress when
  // the residual fell or the state moved.
  auto gauss_seidel = [&] {
    const double start = res;
    const Eigen::VectorXd x0 = x;
    for (int sweep = 0; sweep < opts.gauss_seidel_sweeps && !converged(); ++sweep) {
      ++out.gauss_seidel_sweeps;
      for (int i = 0; i < sys.k(); ++i) {
        Eigen::VectorXd ri(static_cast<Eigen::Index>(sys.nodes()));
        for (std::size_t m = 0; m < sys.nodes(); ++m) ri[static_cast<Eigen::Index>(m)] = r[static_cast<Eigen::Index>(m * sys.k() + i)];
        DirectSolver relax_lu;
        relax_lu.factorize(sys.relaxation_block(x, i));
        const Eigen::VectorXd ci = relax_lu.solve(-ri);
        for (std::size_t m = 0; m < sys.nodes(); ++m) {
          const auto e = static_cast<Eigen::Index>(m * sys.k() + i);
          x[e] = std::max(x[e] + ci[static_cast<Eigen::Index>(m)], sys.lower_bound(m, i));
        }
        r = sys.residual(x, &rhs_norm);
        res = sys.l2(r);
      }
      out.history.push_back(res);
    }
    const double moved = (x - x0).norm();
    return res < (1.0 - 1e-4) * start || moved > std::sqrt(tol) * std::max(1.0, x0.norm());
  };

  int it = 0;
  double last_stall = std::numeric_limits<double>::infinity();
  while (!converged()) {
    if (it >= opts.max_newton) {
      throw NonlinearSolveError("system Newton reached the iteration limit at kappa = " + std::to_string(kappa),
                                out.history);
    }
    ++it;
    lu.factorize(sys.jacobian(x));
    const Eigen::VectorXd dir = lu.solve(-r);
    if (!line_search(dir)) {
      const bool repeated = res >= (1.0 - 1e-4) * last_stall;
      last_stall = res;
      if (repeated || !gauss_seidel())
        throw NonlinearSolveError("system Newton stalled at kappa = " + std::to_string(kappa), out.history);
    }
    out.history.push_back(res);
  }
  out.state = sys.unpack(x);
  out.iterations = it;
  out.residual = res;
  return out;
}

struct ContinuationSchedule {
  double kappa_start = 1.0;
  double factor = 2.0;
  int steps = 18;

  std::vector<double> kappas() const {
    if (!(kappa_start >= 0.0)) throw std::invalid_argument("kappa_start must be nonnegative");
    if (!(factor > 1.0)) throw std::invalid_argument("continuation factor must exceed 1");
    if (steps < 1) throw std::invalid_argument("continuation needs at least one step");
    if (kappa_start == 0.0 && steps > 1)
      throw std::invalid_argument("a schedule starting at kappa = 0 cannot grow geometrically");
    std::vector<double> out;
    double kappa = kappa_start;
    for (int m = 0; m < steps; ++m, kappa *= factor) out.push_back(kappa);
    return out;
  }
};

struct ContinuationStep {
  double kappa = 0.0;
  StateField state;
  DiagnosticsReport diagnostics;
  int newton_iterations = 0;
  double residual = 0.0;
};

struct ContinuationFailure {
  double kappa = 0.0;
  std::string message;
  std::vector<double> residual_history;
};

struct ContinuationTrace {
  std::vector<ContinuationStep> steps;
  std::optional<ContinuationFailure> failure;

  bool complete() const noexcept { return !failure.has_value(); }
};

/// Marches through the schedule with warm starts from the previous solution,
/// starting from the model baseline. A solver failure ends the march and is
/// recorded in the returned (partial) trace. `inequality_tol` <= 0 selects
/// 10 * newton_tol.
inline ContinuationTrace continuation_run(const std::vector<SpeciesParams>& species, const ModelKind& model,
                                          const ContinuationSchedule& schedule, const SolverOptions& opts = {},
                                          double inequality_tol = 0.0) {
  if (model.baseline.empty()) throw std::invalid_argument("continuation starts from the model baseline");
  const double tol_ineq = inequality_tol > 0.0 ? inequality_tol : 10.0 * opts.newton_tol;
  ContinuationTrace trace;
  StateField current = model.baseline;
  for (double kappa : schedule.kappas()) {
    try {
      SystemSolveResult res = solve_system(current, species, model, kappa, opts.newton_tol, opts);
      ContinuationStep step;
      step.kappa = kappa;
      step.diagnostics = diagnose(res.state, species, model, tol_ineq);
      step.newton_iterations = res.iterations;
      step.residual = res.residual;
      step.state = res.state;
      current = std::move(res.state);
      trace.steps.push_back(std::move(step));
    } catch (const NonlinearSolveError& e) {
      trace.failure = ContinuationFailure{kappa, e.what(), e.residual_history()};
      break;
    } catch (const LinearSolveError& e) {
      trace.failure = ContinuationFailure{kappa, e.what(), {}};
      break;
    }
  }
  return trace;
}

}  // namespace segregation
