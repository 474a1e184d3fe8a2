#pragma once

// Segregation diagnostics for a k-species state: pairwise overlaps, the
// discrete differential-inequality system, occupancy of foreign balls,
// the energy, the free boundary and the a-priori box.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "discrete_ops.hpp"
#include "model.hpp"
#include "reaction.hpp"
#include "state_field.hpp"

namespace segregation {

using Matrix = std::vector<std::vector<double>>;

struct ViolationSummary {
  std::size_t count = 0;
  double max_magnitude = 0.0;  ///< largest excess beyond the tolerance band, 0 when count == 0
};

struct InequalityReport {
  std::vector<ViolationSummary> sub;    ///< -Lap u_i <= f_i(u_i)
  std::vector<ViolationSummary> super;  ///< -Lap u^_i >= f^_i
};

struct DiagnosticsReport {
  Matrix overlap_matrix;
  std::vector<ViolationSummary> sub_violations;
  std::vector<ViolationSummary> super_violations;
  Matrix noninvasion;
  double energy = 0.0;
  std::vector<std::size_t> box_violations;
  std::vector<double> h1_norms;
};

struct FreeBoundaryEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  int species = 0;

  friend bool operator==(const FreeBoundaryEdge&, const FreeBoundaryEdge&) = default;
};

struct FreeBoundary {
  std::vector<FreeBoundaryEdge> edges;
  double threshold = 0.0;

  std::size_t size() const noexcept { return edges.size(); }
  bool empty() const noexcept { return edges.empty(); }
};

/// (i, j) = inner(u_i, u_j) off the diagonal, 0 on it.
inline Matrix overlap(const StateField& U) {
  const std::size_t k = U.k();
  Matrix m(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      m[i][j] = inner(U[i], U[j]);
      m[j][i] = m[i][j];
    }
  }
  return m;
}

inline double max_offdiagonal(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (i != j) best = std::max(best, m[i][j]);
  return best;
}

/// Nodal form of the weak inequalities: nonnegative hat functions span the
/// discrete nonnegative test cone, so each inequality reduces to a sign
/// condition on the nodal residual.
inline InequalityReport inequality_check(const StateField& U, const std::vector<SpeciesParams>& species,
                                         double tol) {
  if (species.size() != U.k()) throw std::invalid_argument("one SpeciesParams per component required");
  const auto& d = U.domain();
  InequalityReport out;
  out.sub.resize(U.k());
  out.super.resize(U.k());
  for (std::size_t i = 0; i < U.k(); ++i) {
    const ScalarField lap = apply_laplacian(U[i]);
    const ScalarField hat = hat_transform(U, i);
    const ScalarField hat_lap = apply_laplacian(hat);
    const ScalarField hat_f = hat_rhs(U, species, i);
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (!d.interior(p)) continue;
      const double r_sub = lap[p] - f_eval(species[i], U[i][p]);
      if (r_sub > tol) {
        ++out.sub[i].count;
        out.sub[i].max_magnitude = std::max(out.sub[i].max_magnitude, r_sub - tol);
      }
      const double r_super = hat_lap[p] - hat_f[p];
      if (r_super < -tol) {
        ++out.super[i].count;
        out.super[i].max_magnitude = std::max(out.super[i].max_magnitude, -r_super - tol);
      }
    }
  }
  return out;
}

/// (i, j) = max |u_i| over nodes of ball j. The diagonal is the occupancy of
/// the native ball, max u_i over ball i.
inline Matrix noninvasion(const StateField& U) {
  const auto& d = U.domain();
  const std::size_t k = U.k();
  Matrix m(k, std::vector<double>(k, 0.0));
  for (std::size_t p = 0; p < d.size(); ++p) {
    const int ball = d.ball_label(p);
    if (ball < 0 || static_cast<std::size_t>(ball) >= k) continue;
    const auto j = static_cast<std::size_t>(ball);
    for (std::size_t i = 0; i < k; ++i) {
      const double v = i == j ? U[i][p] : std::abs(U[i][p]);
      m[i][j] = std::max(m[i][j], v);
    }
  }
  return m;
}

/// J(U) = sum_i ( 1/2 |u_i|_{H1 seminorm}^2 - h^2 sum_p F_i(u_i) ).
inline double energy(const StateField& U, const std::vector<SpeciesParams>& species) {
  if (species.size() != U.k()) throw std::invalid_argument("one SpeciesParams per component required");
  const auto& d = U.domain();
  const double h2 = d.h() * d.h();
  double total = 0.0;
  for (std::size_t i = 0; i < U.k(); ++i) {
    const double semi = norm(U[i], NormKind::H1_seminorm);
    double potential = 0.0;
    for (std::size_t p = 0; p < d.size(); ++p)
      if (d.interior(p)) potential += potential_eval(species[i], U[i][p]);
    total += 0.5 * semi * semi - h2 * potential;
  }
  return total;
}

/// 10^-6 of the largest density, the default support threshold.
inline double default_support_threshold(const StateField& U) {
  double m = 0.0;
  for (const auto& u : U) m = std::max(m, u.max_abs());
  return 1e-6 * m;
}

/// Interior grid edges (both endpoints interior) whose endpoints straddle the
/// threshold for some species. Edges are listed species-major in node order.
inline FreeBoundary free_boundary(const StateField& U, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("free_boundary threshold must be positive");
  const auto& d = U.domain();
  FreeBoundary fb;
  fb.threshold = threshold;
  const auto nx = static_cast<std::size_t>(d.nx());
  for (std::size_t i = 0; i < U.k(); ++i) {
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (!d.interior(p)) continue;
      for (std::size_t q : {p + 1, p + nx}) {
        if (!d.interior(q)) continue;
        const bool above_p = U[i][p] > threshold;
        const bool above_q = U[i][q] > threshold;
        if (above_p != above_q) fb.edges.push_back({p, q, static_cast<int>(i)});
      }
    }
  }
  return fb;
}

inline FreeBoundary free_boundary(const StateField& U) {
  const double t = default_support_threshold(U);
  if (t == 0.0) return {};
  return free_boundary(U, t);
}

inline double h1_distance(const StateField& U, const StateField& V) {
  U.check_same(V);
  double s = 0.0;
  for (std::size_t i = 0; i < U.k(); ++i) {
    const double n = norm(U[i] - V[i], NormKind::H1);
    s += n * n;
  }
  return std::sqrt(s);
}

inline double h1_norm(const StateField& U) {
  double s = 0.0;
  for (const auto& u : U) {
    const double n = norm(u, NormKind::H1);
    s += n * n;
  }
  return std::sqrt(s);
}

/// Nodes outside -u_i^0 - tol <= u_i <= phi_i + tol, per species. Without a
/// baseline the lower bound is 0; without caps only the lower bound applies.
inline std::vector<std::size_t> box_violations(const StateField& U, const ModelKind& model, double tol) {
  const auto& d = U.domain();
  std::vector<std::size_t> counts(U.k(), 0);
  const bool has_baseline = !model.baseline.empty();
  for (std::size_t i = 0; i < U.k(); ++i) {
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (!d.interior(p)) continue;
      const double lower = has_baseline ? -model.baseline[i][p] : 0.0;
      bool bad = U[i][p] < lower - tol;
      if (model.truncated()) bad = bad || U[i][p] > model.caps[i][p] + tol;
      counts[i] += bad ? 1 : 0;
    }
  }
  return counts;
}

inline DiagnosticsReport diagnose(const StateField& U, const std::vector<SpeciesParams>& species,
                                  const ModelKind& model, double tol) {
  DiagnosticsReport r;
  r.overlap_matrix = overlap(U);
  auto ineq = inequality_check(U, species, tol);
  r.sub_violations = std::move(ineq.sub);
  r.super_violations = std::move(ineq.super);
  r.noninvasion = noninvasion(U);
  r.energy = energy(U, species);
  r.box_violations = box_violations(U, model, tol);
  for (const auto& u : U) r.h1_norms.push_back(norm(u, NormKind::H1));
  return r;
}

}  // namespace segregation
