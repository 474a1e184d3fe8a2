#pragma once

#include <cstddef>
#include <vector>

#include "discrete_ops.hpp"

namespace segregation {

/// k densities on one shared domain, one per species.
class StateField {
public:
  StateField() = default;

  explicit StateField(std::vector<ScalarField> components) : components_(std::move(components)) {
    for (std::size_t i = 1; i < components_.size(); ++i) components_[0].check_same(components_[i]);
  }

  static StateField zeros(const DomainPtr& domain, std::size_t k) {
    return StateField(std::vector<ScalarField>(k, ScalarField(domain)));
  }

  std::size_t k() const noexcept { return components_.size(); }
  bool empty() const noexcept { return components_.empty(); }
  const GridDomain& domain() const { return components_.front().domain(); }
  const DomainPtr& domain_ptr() const { return components_.front().domain_ptr(); }

  const ScalarField& operator[](std::size_t i) const { return components_[i]; }
  ScalarField& operator[](std::size_t i) { return components_[i]; }

  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }

  StateField& operator+=(const StateField& o) {
    check_same(o);
    for (std::size_t i = 0; i < k(); ++i) components_[i] += o.components_[i];
    return *this;
  }
  StateField& operator-=(const StateField& o) {
    check_same(o);
    for (std::size_t i = 0; i < k(); ++i) components_[i] -= o.components_[i];
    return *this;
  }
  StateField& operator*=(double a) {
    for (auto& c : components_) c *= a;
    return *this;
  }
  friend StateField operator+(StateField a, const StateField& b) { return a += b; }
  friend StateField operator-(StateField a, const StateField& b) { return a -= b; }
  friend StateField operator*(double s, StateField a) { return a *= s; }

  void check_same(const StateField& o) const {
    if (k() != o.k()) throw DomainMismatchError("states have different species counts");
    if (k() > 0) components_[0].check_same(o.components_[0]);
  }

  /// Same values on another mask of the same grid.
  StateField on_domain(const DomainPtr& other) const {
    std::vector<ScalarField> c;
    c.reserve(k());
    for (const auto& u : components_) c.push_back(u.on_domain(other));
    return StateField(std::move(c));
  }

private:
  std::vector<ScalarField> components_;
};

}  // namespace segregation
