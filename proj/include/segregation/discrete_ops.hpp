#pragma once

// Nodal fields on a masked grid and the 5-point Dirichlet Laplacian.
//
// Every reduction runs in ascending node order so scalar outputs are
// bit-reproducible from run to run.

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid_domain.hpp"

namespace segregation {

/// Real value per grid node, exactly zero outside the interior mask.
class ScalarField {
public:
  explicit ScalarField(DomainPtr domain)
      : domain_(std::move(domain)), values_(domain_->size(), 0.0) {}

  ScalarField(DomainPtr domain, std::vector<double> values)
      : domain_(std::move(domain)), values_(std::move(values)) {
    if (values_.size() != domain_->size())
      throw DomainMismatchError("value count does not match grid size");
    enforce_dirichlet();
  }

  /// Samples f(x, y) at interior nodes.
  template <class F>
  static ScalarField from_function(DomainPtr domain, F&& f) {
    ScalarField u(std::move(domain));
    const auto& d = *u.domain_;
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (!d.interior(p)) continue;
      const auto q = d.coords(p);
      u.values_[p] = f(q.x, q.y);
    }
    return u;
  }

  static ScalarField constant(DomainPtr domain, double c) {
    return from_function(std::move(domain), [c](double, double) { return c; });
  }

  const GridDomain& domain() const noexcept { return *domain_; }
  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t p) const noexcept { return values_[p]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Raw access for kernels; callers keep exterior nodes at zero.
  std::vector<double>& mutable_values() noexcept { return values_; }

  void set(std::size_t p, double v) {
    if (p >= values_.size()) throw IndexError("node index out of range");
    if (!domain_->interior(p) && v != 0.0)
      throw DomainError("non-zero value assigned to an exterior node");
    values_[p] = v;
  }

  void enforce_dirichlet() noexcept {
    for (std::size_t p = 0; p < values_.size(); ++p)
      if (!domain_->interior(p)) values_[p] = 0.0;
  }

  bool all_finite() const noexcept {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Same values seen on another mask of the same grid (zero outside it).
  ScalarField on_domain(DomainPtr other) const {
    if (!domain_->same_grid(*other)) throw DomainMismatchError("fields live on different grids");
    return ScalarField(std::move(other), values_);
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  ScalarField& operator+=(const ScalarField& o) {
    check_same(o);
    for (std::size_t p = 0; p < values_.size(); ++p) values_[p] += o.values_[p];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    check_same(o);
    for (std::size_t p = 0; p < values_.size(); ++p) values_[p] -= o.values_[p];
    return *this;
  }
  ScalarField& operator*=(double a) noexcept {
    for (double& v : values_) v *= a;
    return *this;
  }
  /// this += a * x
  ScalarField& axpy(double a, const ScalarField& x) {
    check_same(x);
    for (std::size_t p = 0; p < values_.size(); ++p) values_[p] += a * x.values_[p];
    return *this;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator-(ScalarField a) { return a *= -1.0; }

  void check_same(const ScalarField& o) const {
    if (!domain_->same_domain(*o.domain_)) throw DomainMismatchError("fields live on different domains");
  }

private:
  DomainPtr domain_;
  std::vector<double> values_;
};

enum class NormKind { L2, H1_seminorm, H1, Linf };

/// (A u)_p = (4 u_p - u_N - u_S - u_E - u_W) / h^2 on interior nodes.
inline ScalarField apply_laplacian(const ScalarField& u) {
  const auto& d = u.domain();
  ScalarField out(u.domain_ptr());
  auto& o = out.mutable_values();
  const auto v = u.values();
  const double inv_h2 = 1.0 / (d.h() * d.h());
  const auto nx = static_cast<std::size_t>(d.nx());
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (!d.interior(p)) continue;
    o[p] = (4.0 * v[p] - v[p - 1] - v[p + 1] - v[p - nx] - v[p + nx]) * inv_h2;
  }
  return out;
}

inline double inner(const ScalarField& u, const ScalarField& v) {
  u.check_same(v);
  const double h = u.domain().h();
  double s = 0.0;
  const auto a = u.values();
  const auto b = v.values();
  for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * b[p];
  return h * h * s;
}

namespace detail {

/// Sum of squared differences over every grid edge; exterior nodes hold 0,
/// so edges to boundary ghosts are the one-sided differences.
inline double seminorm_squared(const ScalarField& u) {
  const auto& d = u.domain();
  const auto v = u.values();
  double s = 0.0;
  for (int j = 0; j < d.ny(); ++j) {
    for (int i = 0; i < d.nx(); ++i) {
      const auto p = d.node(i, j);
      if (i + 1 < d.nx()) {
        const double e = v[p] - v[p + 1];
        s += e * e;
      }
      if (j + 1 < d.ny()) {
        const double e = v[p] - v[p + static_cast<std::size_t>(d.nx())];
        s += e * e;
      }
    }
  }
  return s;
}

}  // namespace detail

inline double norm(const ScalarField& u, NormKind kind) {
  switch (kind) {
    case NormKind::L2:
      return std::sqrt(inner(u, u));
    case NormKind::H1_seminorm:
      return std::sqrt(detail::seminorm_squared(u));
    case NormKind::H1:
      return std::sqrt(inner(u, u) + detail::seminorm_squared(u));
    case NormKind::Linf:
      return u.max_abs();
  }
  return 0.0;
}

struct LinearSolveOptions {
  double tol = 1e-10;
  /// 0 selects 50 * sqrt(nx * ny).
  int max_iterations = 0;
};

struct LinearSolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (A + diag(shift)) u = rhs with Jacobi-preconditioned conjugate
/// gradients, starting from `initial` when given. shift must be >= 0.
inline ScalarField solve_spd(const ScalarField& rhs, const ScalarField* shift,
                             const LinearSolveOptions& opts, const ScalarField* initial,
                             LinearSolveInfo* info = nullptr) {
  const auto& d = rhs.domain();
  if (shift) rhs.check_same(*shift);
  if (initial) rhs.check_same(*initial);
  const double inv_h2 = 1.0 / (d.h() * d.h());
  const auto nx = static_cast<std::size_t>(d.nx());
  const int max_it = opts.max_iterations > 0
                         ? opts.max_iterations
                         : static_cast<int>(50.0 * std::sqrt(static_cast<double>(d.nx()) * d.ny()));

  std::vector<std::size_t> nodes;
  nodes.reserve(d.interior_count());
  for (std::size_t p = 0; p < d.size(); ++p)
    if (d.interior(p)) nodes.push_back(p);

  std::vector<double> diag(d.size(), 0.0);
  for (auto p : nodes) {
    const double s = shift ? (*shift)[p] : 0.0;
    if (s < 0.0) throw std::invalid_argument("solve_spd: shift must be nonnegative");
    diag[p] = 4.0 * inv_h2 + s;
  }
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (auto p : nodes)
      y[p] = diag[p] * x[p] - (x[p - 1] + x[p + 1] + x[p - nx] + x[p + nx]) * inv_h2;
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (auto p : nodes) s += a[p] * b[p];
    return s;
  };

  const auto b = rhs.values();
  std::vector<double> x = initial ? std::vector<double>(initial->values().begin(), initial->values().end())
                                  : std::vector<double>(d.size(), 0.0);
  std::vector<double> r(d.size(), 0.0), z(d.size(), 0.0), p_dir(d.size(), 0.0), q(d.size(), 0.0);

  double b_norm = 0.0;
  for (auto p : nodes) b_norm += b[p] * b[p];
  b_norm = std::sqrt(b_norm);
  if (b_norm == 0.0) {
    if (info) *info = {0, 0.0};
    return ScalarField(rhs.domain_ptr());
  }
  const double target = opts.tol * b_norm;

  int it = 0;
  double res = 0.0;
  // Restart from the true residual whenever the recursive one claims convergence.
  while (true) {
    apply(x, q);
    for (auto p : nodes) r[p] = b[p] - q[p];
    res = std::sqrt(dot(r, r));
    if (res <= target || it >= max_it) break;
    for (auto p : nodes) {
      z[p] = r[p] / diag[p];
      p_dir[p] = z[p];
    }
    double rz = dot(r, z);
    while (it < max_it) {
      ++it;
      apply(p_dir, q);
      const double alpha = rz / dot(p_dir, q);
      for (auto p : nodes) {
        x[p] += alpha * p_dir[p];
        r[p] -= alpha * q[p];
      }
      if (std::sqrt(dot(r, r)) <= target) break;
      for (auto p : nodes) z[p] = r[p] / diag[p];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (auto p : nodes) p_dir[p] = z[p] + beta * p_dir[p];
    }
  }
  if (info) *info = {it, res / b_norm};
  if (res > target)
    throw LinearSolveError("conjugate gradients did not converge in " + std::to_string(max_it) +
                               " iterations (relative residual " + std::to_string(res / b_norm) + ")",
                           res / b_norm, it);
  return ScalarField(rhs.domain_ptr(), std::move(x));
}

inline ScalarField solve_spd(const ScalarField& rhs, const ScalarField* shift = nullptr,
                             const LinearSolveOptions& opts = {}) {
  return solve_spd(rhs, shift, opts, nullptr);
}

inline ScalarField solve_spd(const ScalarField& rhs, const ScalarField& shift,
                             const LinearSolveOptions& opts = {}) {
  return solve_spd(rhs, &shift, opts, nullptr);
}

}  // namespace segregation
