#pragma once

// The three coupled competition systems and their nodewise right-hand sides.
//
//   lotka_volterra: -Lap u_i = f_i([u_i]+) - k u_i S_i
//   barrier:        -Lap u_i = f_i(u_i) - k u_i S_i - k u_i S0_i - k b_i S_i
//   positive_part:  -Lap u_i = f_i([u_i + b_i]+ - b_i) - k [u_i + b_i]+ sum_{j!=i} [u_j + b_j]+
//
// with S_i = sum_{j != i} u_j, S0_i = sum_{j != i} b_j and b = U0 the baseline.
// When caps are present f_i is replaced by the truncation at phi_i.

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reaction.hpp"
#include "state_field.hpp"

namespace segregation {

enum class Model { lotka_volterra, barrier, positive_part };

inline std::string_view to_string(Model m) {
  switch (m) {
    case Model::lotka_volterra:
      return "lotka_volterra";
    case Model::barrier:
      return "barrier";
    case Model::positive_part:
      return "positive_part";
  }
  return "unknown";
}

inline Model model_from_string(std::string_view s) {
  if (s == "lotka_volterra") return Model::lotka_volterra;
  if (s == "barrier") return Model::barrier;
  if (s == "positive_part") return Model::positive_part;
  throw std::invalid_argument("unknown model kind '" + std::string(s) + "'");
}

struct ModelKind {
  Model kind = Model::lotka_volterra;
  /// U0. Coupling input for barrier / positive_part; for lotka_volterra it
  /// only seeds continuation. May be empty for lotka_volterra.
  StateField baseline;
  /// phi_i per species when truncation is on, empty otherwise.
  std::vector<ScalarField> caps;

  bool truncated() const noexcept { return !caps.empty(); }
  bool uses_baseline() const noexcept { return kind != Model::lotka_volterra; }
};

namespace detail {

/// Right-hand side values and their Jacobian d rhs_i / d u_j at one node.
/// Positive parts use the generalized derivative 1 at zero.
struct LocalTerms {
  static constexpr int max_species = 16;
  double rhs[max_species];
  double jac[max_species][max_species];
};

inline void local_terms(Model kind, const std::vector<SpeciesParams>& species, double kappa,
                        const double* u, const double* b, const double* cap, int k, LocalTerms& out,
                        bool with_jacobian) {
  const double inf = std::numeric_limits<double>::infinity();
  double sum_u = 0.0;
  double sum_b = 0.0;
  double sum_pos = 0.0;
  double pos[LocalTerms::max_species];
  double active[LocalTerms::max_species];
  for (int i = 0; i < k; ++i) {
    sum_u += u[i];
    sum_b += b[i];
    const double w = u[i] + b[i];
    pos[i] = w >= 0.0 ? w : 0.0;
    active[i] = w >= 0.0 ? 1.0 : 0.0;
    sum_pos += pos[i];
  }

  for (int i = 0; i < k; ++i) {
    const double c = cap ? cap[i] : inf;
    const auto& sp = species[static_cast<std::size_t>(i)];
    double react = 0.0;
    double react_prime = 0.0;
    switch (kind) {
      case Model::lotka_volterra: {
        const double s = u[i] >= 0.0 ? u[i] : 0.0;
        react = f_truncated_eval(sp, s, c);
        react_prime = u[i] >= 0.0 ? f_truncated_prime(sp, s, c) : 0.0;
        const double others = sum_u - u[i];
        out.rhs[i] = react - kappa * u[i] * others;
        if (with_jacobian) {
          for (int j = 0; j < k; ++j) out.jac[i][j] = j == i ? react_prime - kappa * others : -kappa * u[i];
        }
        break;
      }
      case Model::barrier: {
        react = f_truncated_eval(sp, u[i], c);
        react_prime = f_truncated_prime(sp, u[i], c);
        const double others = sum_u - u[i];
        const double others_b = sum_b - b[i];
        out.rhs[i] = react - kappa * u[i] * others - kappa * u[i] * others_b - kappa * b[i] * others;
        if (with_jacobian) {
          for (int j = 0; j < k; ++j)
            out.jac[i][j] = j == i ? react_prime - kappa * (others + others_b) : -kappa * (u[i] + b[i]);
        }
        break;
      }
      case Model::positive_part: {
        const double s = pos[i] - b[i];
        react = f_truncated_eval(sp, s, c);
        react_prime = active[i] * f_truncated_prime(sp, s, c);
        const double others = sum_pos - pos[i];
        out.rhs[i] = react - kappa * pos[i] * others;
        if (with_jacobian) {
          for (int j = 0; j < k; ++j)
            out.jac[i][j] = j == i ? react_prime - kappa * active[i] * others : -kappa * pos[i] * active[j];
        }
        break;
      }
    }
  }
}

}  // namespace detail
}  // namespace segregation
