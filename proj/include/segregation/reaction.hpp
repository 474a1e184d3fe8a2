#pragma once

// Logistic reaction terms f(s) = lambda (s - |s|^(p-1) s), their derivative,
// primitive and capped variant, plus the "hat" combinations used by the
// reverse differential inequality.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "state_field.hpp"

namespace segregation {

struct SpeciesParams {
  double lambda = 1.0;
  double p = 2.0;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("species lambda must be positive");
    if (!(p > 1.0)) throw std::invalid_argument("species exponent p must exceed 1");
  }
};

/// |s|^(p-1) s written as sign(s) |s|^p, odd for every p.
inline double signed_power(double s, double p) {
  const double m = std::pow(std::abs(s), p);
  return s < 0.0 ? -m : m;
}

inline double f_eval(const SpeciesParams& sp, double s) { return sp.lambda * (s - signed_power(s, sp.p)); }

inline double f_prime(const SpeciesParams& sp, double s) {
  return sp.lambda * (1.0 - sp.p * std::pow(std::abs(s), sp.p - 1.0));
}

/// F(s) = integral of f from 0 to s.
inline double potential_eval(const SpeciesParams& sp, double s) {
  return sp.lambda * (0.5 * s * s - std::pow(std::abs(s), sp.p + 1.0) / (sp.p + 1.0));
}

/// f frozen at the cap above it.
inline double f_truncated_eval(const SpeciesParams& sp, double s, double cap) {
  return s <= cap ? f_eval(sp, s) : f_eval(sp, cap);
}

inline double f_truncated_prime(const SpeciesParams& sp, double s, double cap) {
  return s <= cap ? f_prime(sp, s) : 0.0;
}

/// u_i - sum_{j != i} u_j
inline ScalarField hat_transform(const StateField& U, std::size_t i) {
  ScalarField out = U[i];
  for (std::size_t j = 0; j < U.k(); ++j)
    if (j != i) out -= U[j];
  return out;
}

/// f_i(u_i) - sum_{j != i} f_j(u_j), evaluated literally from every component.
inline ScalarField hat_rhs(const StateField& U, const std::vector<SpeciesParams>& species,
                           std::size_t i) {
  if (species.size() != U.k()) throw std::invalid_argument("one SpeciesParams per component required");
  const auto& d = U.domain();
  ScalarField out(U.domain_ptr());
  auto& o = out.mutable_values();
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (!d.interior(p)) continue;
    double s = f_eval(species[i], U[i][p]);
    for (std::size_t j = 0; j < U.k(); ++j)
      if (j != i) s -= f_eval(species[j], U[j][p]);
    o[p] = s;
  }
  return out;
}

/// Nodewise f(u) on the field's domain.
inline ScalarField reaction_field(const SpeciesParams& sp, const ScalarField& u) {
  ScalarField out(u.domain_ptr());
  auto& o = out.mutable_values();
  for (std::size_t p = 0; p < u.size(); ++p)
    if (u.domain().interior(p)) o[p] = f_eval(sp, u[p]);
  return out;
}

}  // namespace segregation
