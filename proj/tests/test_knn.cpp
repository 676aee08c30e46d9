// The kd-tree backend must agree with the brute-force scan bit for bit: both
// share one squared-distance kernel, so any divergence is a tree bug, not
// floating-point noise.

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "elliptest/errors.hpp"
#include "elliptest/knn.hpp"
#include "elliptest/rng.hpp"

using Catch::Matchers::WithinAbs;
using elliptest::knn_distances;
using elliptest::knn_distances_brute;
using elliptest::knn_distances_tree;

namespace {

Eigen::MatrixXd random_points(int n, int d, std::uint64_t seed, bool lattice = false) {
  elliptest::Rng rng(seed);
  Eigen::MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      // Lattice inputs force exact distance ties across many point pairs.
      pts(i, j) = lattice ? std::floor(8.0 * rng.uniform()) : rng.normal();
    }
  }
  return pts;
}

bool has_exact_duplicate(const Eigen::MatrixXd& pts) {
  for (int i = 0; i < pts.rows(); ++i) {
    for (int j = i + 1; j < pts.rows(); ++j) {
      if (pts.row(i) == pts.row(j)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("three points by hand", "[knn]") {
  Eigen::MatrixXd pts(3, 2);
  pts << 0.0, 0.0, 3.0, 0.0, 0.0, 4.0;
  const elliptest::NeighborDistances nd = knn_distances(pts, 2);
  REQUIRE(nd.n == 3);
  REQUIRE(nd.k == 2);
  // Pairwise distances are the 3-4-5 triangle.
  REQUIRE_THAT(nd(0, 0), WithinAbs(3.0, 1e-15));
  REQUIRE_THAT(nd(0, 1), WithinAbs(4.0, 1e-15));
  REQUIRE_THAT(nd(1, 0), WithinAbs(3.0, 1e-15));
  REQUIRE_THAT(nd(1, 1), WithinAbs(5.0, 1e-15));
  REQUIRE_THAT(nd(2, 0), WithinAbs(4.0, 1e-15));
  REQUIRE_THAT(nd(2, 1), WithinAbs(5.0, 1e-15));
}

TEST_CASE("rows are nondecreasing", "[knn]") {
  const Eigen::MatrixXd pts = random_points(120, 3, 7);
  const elliptest::NeighborDistances nd = knn_distances(pts, 10);
  for (int i = 0; i < nd.n; ++i) {
    for (int j = 0; j + 1 < nd.k; ++j) {
      REQUIRE(nd(i, j) <= nd(i, j + 1));
    }
  }
}

TEST_CASE("tree and brute force agree bitwise", "[knn][oracle]") {
  struct Case {
    int n, d, k;
    bool lattice;
  };
  const Case cases[] = {
      {10, 1, 3, false},   {257, 1, 12, false}, {50, 2, 7, false},  {200, 2, 25, false},
      {300, 3, 5, false},  {128, 5, 20, false}, {90, 10, 9, false}, {64, 16, 6, false},
      {150, 2, 10, true},  {100, 3, 15, true},  {40, 1, 39, false}, {65, 6, 1, false},
  };
  std::uint64_t seed = 1000;
  for (const Case& c : cases) {
    Eigen::MatrixXd pts = random_points(c.n, c.d, seed++, c.lattice);
    if (has_exact_duplicate(pts)) {
      elliptest::apply_jitter(pts, 1e-9, seed);
    }
    INFO("n=" << c.n << " d=" << c.d << " k=" << c.k << " lattice=" << c.lattice);
    const elliptest::NeighborDistances tree = knn_distances_tree(pts, c.k);
    const elliptest::NeighborDistances brute = knn_distances_brute(pts, c.k);
    REQUIRE(tree.dist == brute.dist);
    const elliptest::NeighborDistances front = knn_distances(pts, c.k);
    REQUIRE(front.dist == brute.dist);
  }
}

TEST_CASE("one-dimensional sweep matches brute force on adversarial input", "[knn]") {
  // Sorted, reversed, and clustered values exercise the two-pointer walk.
  Eigen::MatrixXd pts(9, 1);
  pts << -5.0, -4.9, -4.8, 0.0, 0.1, 100.0, 100.5, 101.0, 150.0;
  for (int k : {1, 2, 5, 8}) {
    INFO("k = " << k);
    REQUIRE(knn_distances_tree(pts, k).dist == knn_distances_brute(pts, k).dist);
  }
}

TEST_CASE("distance ties rank deterministically", "[knn]") {
  // Unit grid: the center has four neighbors at distance exactly 1.
  Eigen::MatrixXd pts(5, 2);
  pts << 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0;
  const elliptest::NeighborDistances nd = knn_distances(pts, 4);
  for (int j = 0; j < 4; ++j) {
    REQUIRE(nd(0, j) == 1.0);
  }
  REQUIRE(knn_distances_tree(pts, 4).dist == knn_distances_brute(pts, 4).dist);
}

TEST_CASE("isometries preserve neighbor distances", "[knn]") {
  Eigen::MatrixXd pts = random_points(80, 2, 99);
  // Snap coordinates to a dyadic grid so translation below is exact.
  for (int i = 0; i < pts.rows(); ++i) {
    for (int j = 0; j < pts.cols(); ++j) {
      pts(i, j) = std::round(pts(i, j) * 1048576.0) / 1048576.0;
    }
  }
  const elliptest::NeighborDistances base = knn_distances(pts, 6);

  // Translation by a dyadic vector of dyadic points is exact in floating point.
  Eigen::MatrixXd shifted = pts;
  shifted.col(0).array() += 2.5;
  shifted.col(1).array() -= 0.25;
  REQUIRE(knn_distances(shifted, 6).dist == base.dist);

  // Rotation is not exact; distances agree to roundoff.
  const double c = std::cos(0.7), s = std::sin(0.7);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  const Eigen::MatrixXd rotated = pts * rot.transpose();
  const elliptest::NeighborDistances rd = knn_distances(rotated, 6);
  for (std::size_t i = 0; i < base.dist.size(); ++i) {
    REQUIRE_THAT(rd.dist[i], WithinAbs(base.dist[i], 1e-12));
  }
}

TEST_CASE("duplicate rows are reported with their indices", "[knn]") {
  Eigen::MatrixXd pts(5, 2);
  pts << 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 3.0, 3.0, 1.0, 2.0;
  try {
    knn_distances(pts, 2);
    FAIL("expected DuplicatePoints");
  } catch (const elliptest::DuplicatePoints& e) {
    REQUIRE(e.pairs().size() == 2);
    REQUIRE(e.pairs()[0] == std::make_pair(0, 2));
    REQUIRE(e.pairs()[1] == std::make_pair(1, 4));
  }
}

TEST_CASE("jitter breaks duplicates deterministically", "[knn]") {
  Eigen::MatrixXd pts(4, 2);
  pts << 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0;
  Eigen::MatrixXd a = pts, b = pts;
  elliptest::apply_jitter(a, 1e-6, 5);
  elliptest::apply_jitter(b, 1e-6, 5);
  REQUIRE(a == b);
  REQUIRE((a - pts).cwiseAbs().maxCoeff() <= 1e-6);
  REQUIRE((a - pts).cwiseAbs().maxCoeff() > 0.0);
  REQUIRE_NOTHROW(knn_distances(a, 2));

  Eigen::MatrixXd c = pts;
  elliptest::apply_jitter(c, 1e-6, 6);
  REQUIRE(a != c);
}

TEST_CASE("input validation", "[knn]") {
  const Eigen::MatrixXd pts = random_points(10, 2, 3);
  REQUIRE_THROWS_AS(knn_distances(pts, 0), elliptest::InvalidK);
  REQUIRE_THROWS_AS(knn_distances(pts, 10), elliptest::InvalidK);
  REQUIRE_NOTHROW(knn_distances(pts, 9));

  Eigen::MatrixXd bad = pts;
  bad(3, 1) = std::nan("");
  REQUIRE_THROWS_AS(knn_distances(bad, 2), elliptest::InvalidInput);
  bad(3, 1) = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(knn_distances(bad, 2), elliptest::InvalidInput);

  const Eigen::MatrixXd empty(0, 2);
  REQUIRE_THROWS_AS(knn_distances(empty, 1), elliptest::InvalidInput);
}
