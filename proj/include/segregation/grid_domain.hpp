#pragma once

// Masked uniform Cartesian grids for unions of disjoint balls joined by thin
// straight corridors. Node p = j * nx + i sits at (x0 + i h, y0 + j h).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"

namespace segregation {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BallSpec {
  Point center;
  double radius = 1.0;
  int species_index = 0;
};

struct CorridorSpec {
  int from_ball = 0;
  int to_ball = 1;
  double width = 0.1;
};

struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;
};

enum class RegionKind { exterior, ball, corridor };

struct Region {
  RegionKind kind = RegionKind::exterior;
  int ball = -1;  ///< species index of the ball when kind == ball

  friend bool operator==(const Region&, const Region&) = default;
};

class GridDomain;
using DomainPtr = std::shared_ptr<const GridDomain>;

/// Immutable after construction. Fields refer to it through DomainPtr.
class GridDomain {
public:
  using Mask = std::vector<std::uint8_t>;

  GridDomain(int nx, int ny, double h, Point origin, Mask interior,
             std::vector<int> ball_label, Mask corridor_flag)
      : nx_(nx), ny_(ny), h_(h), origin_(origin), interior_(std::move(interior)),
        ball_label_(std::move(ball_label)), corridor_(std::move(corridor_flag)) {
    const auto n = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    if (nx_ < 3 || ny_ < 3) throw DomainError("grid needs at least 3x3 nodes");
    if (!(h_ > 0.0)) throw DomainError("grid spacing must be positive");
    if (interior_.size() != n || ball_label_.size() != n || corridor_.size() != n)
      throw DomainError("mask sizes do not match grid dimensions");
    for (int i = 0; i < nx_; ++i) {
      if (interior_[node(i, 0)] || interior_[node(i, ny_ - 1)])
        throw DomainError("interior node on the grid boundary (bounding box too tight)");
    }
    for (int j = 0; j < ny_; ++j) {
      if (interior_[node(0, j)] || interior_[node(nx_ - 1, j)])
        throw DomainError("interior node on the grid boundary (bounding box too tight)");
    }
    for (std::size_t p = 0; p < n; ++p) {
      if (!interior_[p]) {
        ball_label_[p] = -1;
        corridor_[p] = 0;
      }
      interior_count_ += interior_[p] ? 1 : 0;
    }
  }

  /// Plain masked grid (no ball or corridor labels). Boundary nodes must be exterior.
  static DomainPtr from_mask(int nx, int ny, double h, Point origin, Mask interior) {
    const auto n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    return std::make_shared<GridDomain>(nx, ny, h, origin, std::move(interior),
                                        std::vector<int>(n, -1), Mask(n, 0));
  }

  /// Nodes strictly inside the rectangle. The grid spans the rectangle itself.
  static DomainPtr rectangle(const BoundingBox& box, double h) {
    if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
    const int nx = static_cast<int>(std::floor((box.x_max - box.x_min) / h + 1e-9)) + 1;
    const int ny = static_cast<int>(std::floor((box.y_max - box.y_min) / h + 1e-9)) + 1;
    Mask mask(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double x = box.x_min + i * h;
        const double y = box.y_min + j * h;
        mask[static_cast<std::size_t>(j) * nx + i] =
            x > box.x_min && x < box.x_max && y > box.y_min && y < box.y_max &&
            std::abs(x - box.x_max) > 1e-9 * h && std::abs(y - box.y_max) > 1e-9 * h;
      }
    }
    return from_mask(nx, ny, h, {box.x_min, box.y_min}, std::move(mask));
  }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double h() const noexcept { return h_; }
  Point origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return interior_.size(); }
  std::size_t interior_count() const noexcept { return interior_count_; }

  std::size_t node(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }
  int col(std::size_t p) const noexcept { return static_cast<int>(p % static_cast<std::size_t>(nx_)); }
  int row(std::size_t p) const noexcept { return static_cast<int>(p / static_cast<std::size_t>(nx_)); }
  double x(int i) const noexcept { return origin_.x + i * h_; }
  double y(int j) const noexcept { return origin_.y + j * h_; }
  Point coords(std::size_t p) const noexcept { return {x(col(p)), y(row(p))}; }

  bool interior(std::size_t p) const noexcept { return interior_[p] != 0; }
  int ball_label(std::size_t p) const noexcept { return ball_label_[p]; }
  bool corridor(std::size_t p) const noexcept { return corridor_[p] != 0; }

  const Mask& interior_mask() const noexcept { return interior_; }
  const std::vector<int>& ball_labels() const noexcept { return ball_label_; }
  const Mask& corridor_mask() const noexcept { return corridor_; }

  /// The four grid neighbours of an interior node exist because boundary nodes are exterior.
  std::array<std::size_t, 4> neighbours(std::size_t p) const noexcept {
    const auto nx = static_cast<std::size_t>(nx_);
    return {p - 1, p + 1, p - nx, p + nx};
  }

  bool same_grid(const GridDomain& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && h_ == o.h_ && origin_.x == o.origin_.x &&
           origin_.y == o.origin_.y;
  }
  bool same_domain(const GridDomain& o) const noexcept {
    return this == &o || (same_grid(o) && interior_ == o.interior_);
  }

  /// Sub-domain on the same grid: interior = this interior AND keep.
  DomainPtr restrict_to(const Mask& keep) const {
    if (keep.size() != size()) throw DomainError("restriction mask has wrong size");
    Mask interior(size(), 0);
    for (std::size_t p = 0; p < size(); ++p) interior[p] = interior_[p] && keep[p];
    return std::make_shared<GridDomain>(nx_, ny_, h_, origin_, std::move(interior), ball_label_,
                                        corridor_);
  }

  /// Interior nodes labelled with the given ball.
  DomainPtr ball_region(int ball) const {
    Mask keep(size(), 0);
    for (std::size_t p = 0; p < size(); ++p) keep[p] = ball_label_[p] == ball;
    return restrict_to(keep);
  }

private:
  int nx_;
  int ny_;
  double h_;
  Point origin_;
  Mask interior_;
  std::vector<int> ball_label_;
  Mask corridor_;
  std::size_t interior_count_ = 0;
};

namespace detail {

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline bool inside_ball(const BallSpec& b, Point q) {
  const double dx = q.x - b.center.x;
  const double dy = q.y - b.center.y;
  return dx * dx + dy * dy < b.radius * b.radius;
}

inline bool inside_corridor(Point a, Point b, double width, Point q) {
  const double len = distance(a, b);
  const double ux = (b.x - a.x) / len;
  const double uy = (b.y - a.y) / len;
  const double t = (q.x - a.x) * ux + (q.y - a.y) * uy;
  const double d = -(q.x - a.x) * uy + (q.y - a.y) * ux;
  return t > 0.0 && t < len && std::abs(d) < 0.5 * width;
}

}  // namespace detail

/// Rasterizes the union of open balls and corridor rectangles: a node is
/// interior iff it lies strictly inside one of them. Nodes inside a ball are
/// labelled with that ball's species index even where a corridor overlaps.
inline DomainPtr build_domain(const std::vector<BallSpec>& balls,
                              const std::vector<CorridorSpec>& corridors, const BoundingBox& bbox,
                              double h) {
  if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
  if (balls.empty()) throw DomainError("at least one ball is required");
  if (!(bbox.x_max > bbox.x_min && bbox.y_max > bbox.y_min))
    throw DomainError("bounding box is empty");

  const int k = static_cast<int>(balls.size());
  std::vector<int> seen(balls.size(), 0);
  for (const auto& b : balls) {
    if (!(b.radius > 0.0)) throw DomainError("ball radius must be positive");
    if (b.species_index < 0 || b.species_index >= k)
      throw DomainError("ball species index out of range");
    if (seen[b.species_index]++) throw DomainError("two balls share a species index");
    if (!(b.center.x - b.radius > bbox.x_min && b.center.x + b.radius < bbox.x_max &&
          b.center.y - b.radius > bbox.y_min && b.center.y + b.radius < bbox.y_max))
      throw DomainError("bounding box does not strictly contain every ball");
  }
  for (std::size_t a = 0; a < balls.size(); ++a) {
    for (std::size_t b = a + 1; b < balls.size(); ++b) {
      if (!(detail::distance(balls[a].center, balls[b].center) > balls[a].radius + balls[b].radius))
        throw DomainError("balls not disjoint");
    }
  }
  for (const auto& c : corridors) {
    if (c.from_ball < 0 || c.from_ball >= k || c.to_ball < 0 || c.to_ball >= k)
      throw DomainError("corridor endpoint does not name a ball");
    if (c.from_ball == c.to_ball) throw DomainError("corridor joins a ball to itself");
    if (!(c.width > 0.0)) throw DomainError("corridor width must be positive");
    if (!(c.width < std::min(balls[c.from_ball].radius, balls[c.to_ball].radius)))
      throw DomainError("corridor width must be smaller than both endpoint radii");
    if (std::ceil(c.width / h - 1e-12) - 1.0 < 3.0) throw DomainError("corridor unresolved");
  }

  const int nx = static_cast<int>(std::floor((bbox.x_max - bbox.x_min) / h + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor((bbox.y_max - bbox.y_min) / h + 1e-9)) + 1;
  const auto n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  GridDomain::Mask interior(n, 0);
  GridDomain::Mask corridor(n, 0);
  std::vector<int> label(n, -1);

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * nx + i;
      const Point q{bbox.x_min + i * h, bbox.y_min + j * h};
      for (const auto& b : balls) {
        if (detail::inside_ball(b, q)) {
          label[p] = b.species_index;
          interior[p] = 1;
          break;
        }
      }
      if (interior[p]) continue;
      for (const auto& c : corridors) {
        if (detail::inside_corridor(balls[c.from_ball].center, balls[c.to_ball].center, c.width, q)) {
          corridor[p] = 1;
          interior[p] = 1;
          break;
        }
      }
    }
  }

  auto domain = std::make_shared<GridDomain>(nx, ny, h, Point{bbox.x_min, bbox.y_min},
                                             std::move(interior), std::move(label),
                                             std::move(corridor));

  // Distinct balls must not touch through a single grid edge.
  for (std::size_t p = 0; p < n; ++p) {
    const int a = domain->ball_label(p);
    if (a < 0) continue;
    for (auto q : domain->neighbours(p)) {
      const int b = domain->ball_label(q);
      if (b >= 0 && b != a) throw DomainError("balls are grid-adjacent at this spacing");
    }
  }
  return domain;
}

inline Region region_membership(const GridDomain& domain, int i, int j) {
  if (i < 0 || j < 0 || i >= domain.nx() || j >= domain.ny())
    throw IndexError("node (" + std::to_string(i) + "," + std::to_string(j) + ") outside the grid");
  const auto p = domain.node(i, j);
  if (!domain.interior(p)) return {};
  if (domain.ball_label(p) >= 0) return {RegionKind::ball, domain.ball_label(p)};
  return {RegionKind::corridor, -1};
}

/// Number of 4-connected components of the nodes selected by `mask`.
inline int connected_components(const GridDomain& domain, const GridDomain::Mask& mask) {
  std::vector<std::uint8_t> visited(domain.size(), 0);
  int components = 0;
  std::queue<std::size_t> pending;
  for (std::size_t s = 0; s < domain.size(); ++s) {
    if (!mask[s] || visited[s]) continue;
    ++components;
    visited[s] = 1;
    pending.push(s);
    while (!pending.empty()) {
      const auto p = pending.front();
      pending.pop();
      const int i = domain.col(p);
      const int j = domain.row(p);
      const std::array<std::pair<int, int>, 4> nb{{{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
      for (auto [a, b] : nb) {
        if (a < 0 || b < 0 || a >= domain.nx() || b >= domain.ny()) continue;
        const auto q = domain.node(a, b);
        if (mask[q] && !visited[q]) {
          visited[q] = 1;
          pending.push(q);
        }
      }
    }
  }
  return components;
}

inline int connected_components(const GridDomain& domain) {
  return connected_components(domain, domain.interior_mask());
}

}  // namespace segregation
