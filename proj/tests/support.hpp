#pragma once

#include <segregation/segregation.hpp>

#include <cmath>
#include <vector>

namespace testing_support {

using namespace segregation;

/// 3x3 grid, h = 1, only the centre node interior.
inline DomainPtr tiny() {
  GridDomain::Mask m(9, 0);
  m[4] = 1;
  return GridDomain::from_mask(3, 3, 1.0, {0.0, 0.0}, m);
}

inline DomainPtr unit_square(int n) { return GridDomain::rectangle({0.0, 0.0, 1.0, 1.0}, 1.0 / n); }

inline DomainPtr unit_disk(double h) {
  return build_domain({{{0.0, 0.0}, 1.0, 0}}, {}, {-1.25, -1.25, 1.25, 1.25}, h);
}

/// Balls of radius 1 centred at (3 m, 0), chained by corridors when width > 0.
inline DomainPtr chain(int balls, double h, double width) {
  std::vector<BallSpec> b;
  std::vector<CorridorSpec> c;
  for (int m = 0; m < balls; ++m) b.push_back({{3.0 * m, 0.0}, 1.0, m});
  if (width > 0.0)
    for (int m = 0; m + 1 < balls; ++m) c.push_back({m, m + 1, width});
  return build_domain(b, c, {-1.25, -1.25, 3.0 * (balls - 1) + 1.25, 1.25}, h);
}

/// Positive single-ball states u_i^0 on every ball of `d`, lambda_i = ratio * lambda_1(B_i).
struct Baseline {
  std::vector<SpeciesParams> species;
  StateField state;
};

inline Baseline baseline(const DomainPtr& d, int k, double ratio = 2.0, const SolverOptions& opts = {}) {
  Baseline out;
  std::vector<ScalarField> parts;
  for (int i = 0; i < k; ++i) {
    const DomainPtr region = d->ball_region(i);
    const EigenPair g = principal_eigenvalue(region, opts);
    SpeciesParams sp{ratio * g.value, 2.0};
    out.species.push_back(sp);
    parts.push_back(solve_ball(sp, region, positive_seed(region), opts).solution.on_domain(d));
  }
  out.state = StateField(std::move(parts));
  return out;
}

/// k copies of the whole-domain positive seed.
inline StateField whole_domain_seeds(const DomainPtr& d, std::size_t k) {
  return StateField(std::vector<ScalarField>(k, positive_seed(d)));
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

}  // namespace testing_support
