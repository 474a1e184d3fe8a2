#include <gtest/gtest.h>

#include "support.hpp"

using namespace segregation;
using namespace testing_support;

namespace {

const BoundingBox chain_box{-1.25, -1.25, 7.25, 1.25};

std::vector<BallSpec> three_balls() {
  return {{{0.0, 0.0}, 1.0, 0}, {{3.0, 0.0}, 1.0, 1}, {{6.0, 0.0}, 1.0, 2}};
}

}  // namespace

TEST(GridDomain, DisjointBallsGiveOneComponentEach) {
  const auto d = build_domain(three_balls(), {}, chain_box, 1.0 / 16);
  EXPECT_EQ(connected_components(*d), 3);
}

TEST(GridDomain, CorridorsConnectTheChain) {
  const auto d = build_domain(three_balls(), {{0, 1, 0.25}, {1, 2, 0.25}}, chain_box, 1.0 / 16);
  EXPECT_EQ(connected_components(*d), 1);
}

TEST(GridDomain, OverlappingBallsRejected) {
  EXPECT_THROW(build_domain({{{0.0, 0.0}, 1.0, 0}, {{1.5, 0.0}, 1.0, 1}}, {}, {-2, -2, 4, 2}, 0.1), DomainError);
  // Tangent closed balls are not disjoint either.
  EXPECT_THROW(build_domain({{{0.0, 0.0}, 1.0, 0}, {{2.0, 0.0}, 1.0, 1}}, {}, {-2, -2, 4, 2}, 0.1), DomainError);
}

TEST(GridDomain, InvalidSpecsRejected) {
  const auto balls = three_balls();
  EXPECT_THROW(build_domain({{{0.0, 0.0}, 0.0, 0}}, {}, {-2, -2, 2, 2}, 0.1), DomainError);
  EXPECT_THROW(build_domain(balls, {{0, 0, 0.2}}, chain_box, 1.0 / 32), DomainError);
  EXPECT_THROW(build_domain(balls, {{0, 5, 0.2}}, chain_box, 1.0 / 32), DomainError);
  EXPECT_THROW(build_domain(balls, {{0, 1, 1.5}}, chain_box, 1.0 / 32), DomainError);
  EXPECT_THROW(build_domain(balls, {{0, 1, -0.1}}, chain_box, 1.0 / 32), DomainError);
  EXPECT_THROW(build_domain(balls, {}, {-0.5, -1.25, 7.25, 1.25}, 1.0 / 32), DomainError);
  EXPECT_THROW(build_domain(balls, {}, chain_box, 0.0), DomainError);
  EXPECT_THROW(build_domain({{{0.0, 0.0}, 1.0, 0}, {{3.0, 0.0}, 1.0, 0}}, {}, chain_box, 0.1), DomainError);
}

TEST(GridDomain, UnresolvedCorridorRejected) {
  // Width 0.2 at h = 0.1 leaves a single node across the corridor.
  EXPECT_THROW(build_domain(three_balls(), {{0, 1, 0.2}}, chain_box, 0.1), DomainError);
  EXPECT_NO_THROW(build_domain(three_balls(), {{0, 1, 0.2}}, chain_box, 1.0 / 32));
}

TEST(GridDomain, RegionMembership) {
  const double h = 1.0 / 32;
  const auto d = build_domain(three_balls(), {{0, 1, 0.2}, {1, 2, 0.2}}, chain_box, h);
  auto index = [&](double x, double y) {
    return std::pair{static_cast<int>(std::lround((x - chain_box.x_min) / h)),
                     static_cast<int>(std::lround((y - chain_box.y_min) / h))};
  };
  for (int b = 0; b < 3; ++b) {
    const auto [i, j] = index(3.0 * b, 0.0);
    const Region r = region_membership(*d, i, j);
    EXPECT_EQ(r.kind, RegionKind::ball);
    EXPECT_EQ(r.ball, b);
  }
  const auto [ci, cj] = index(1.5, 0.0);
  EXPECT_EQ(region_membership(*d, ci, cj).kind, RegionKind::corridor);
  EXPECT_EQ(region_membership(*d, 0, 0).kind, RegionKind::exterior);
  const auto [ei, ej] = index(1.5, 1.0);
  EXPECT_EQ(region_membership(*d, ei, ej).kind, RegionKind::exterior);
  EXPECT_THROW(region_membership(*d, -1, 0), IndexError);
  EXPECT_THROW(region_membership(*d, 0, d->ny()), IndexError);
}

TEST(GridDomain, InteriorNodesAreBallXorCorridor) {
  const auto d = chain(3, 1.0 / 32, 0.2);
  for (std::size_t p = 0; p < d->size(); ++p) {
    if (!d->interior(p)) {
      EXPECT_EQ(d->ball_label(p), -1);
      EXPECT_FALSE(d->corridor(p));
      continue;
    }
    EXPECT_NE(d->ball_label(p) >= 0, d->corridor(p)) << "node " << p;
  }
}

TEST(GridDomain, BallRegionsAreNotGridAdjacent) {
  const auto d = chain(3, 1.0 / 32, 0.2);
  for (std::size_t p = 0; p < d->size(); ++p) {
    const int a = d->ball_label(p);
    if (a < 0) continue;
    for (auto q : d->neighbours(p)) {
      const int b = d->ball_label(q);
      EXPECT_TRUE(b < 0 || b == a);
    }
  }
}

TEST(GridDomain, BallRegionMatchesDisk) {
  const double h = 1.0 / 16;
  const auto d = chain(2, h, 0.25);
  const auto r0 = d->ball_region(0);
  EXPECT_TRUE(r0->same_grid(*d));
  std::size_t count = 0;
  for (std::size_t p = 0; p < d->size(); ++p) {
    const auto q = d->coords(p);
    const bool inside = q.x * q.x + q.y * q.y < 1.0;
    EXPECT_EQ(r0->interior(p), inside);
    count += inside ? 1 : 0;
  }
  EXPECT_EQ(r0->interior_count(), count);
  EXPECT_EQ(connected_components(*r0), 1);
}

TEST(GridDomain, RectangleKeepsBoundaryExterior) {
  const auto d = unit_square(8);
  EXPECT_EQ(d->nx(), 9);
  EXPECT_EQ(d->ny(), 9);
  EXPECT_EQ(d->interior_count(), 49u);
  EXPECT_FALSE(d->interior(d->node(0, 4)));
  EXPECT_FALSE(d->interior(d->node(8, 4)));
  EXPECT_TRUE(d->interior(d->node(1, 1)));
}

TEST(GridDomain, InteriorOnGridBoundaryRejected) {
  GridDomain::Mask m(9, 1);
  EXPECT_THROW(GridDomain::from_mask(3, 3, 1.0, {0, 0}, m), DomainError);
}
