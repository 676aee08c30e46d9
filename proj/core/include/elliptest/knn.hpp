#pragma once

//! k-nearest-neighbor distances under the Euclidean metric, self-excluded.
//! Two backends (kd-tree and brute force) share one distance kernel and must
//! agree bitwise; the automatic front end picks brute force for tiny or
//! high-dimensional inputs where the tree does not pay off.

#include <Eigen/Core>
#include <vector>

namespace elliptest {

struct NeighborDistances {
  int n = 0;
  int k = 0;
  // Row-major n x k: dist(i, j) is the (j+1)-th smallest distance from point
  // i to any other point. Rows are nondecreasing left to right.
  std::vector<double> dist;

  double operator()(int i, int j) const { return dist[static_cast<std::size_t>(i) * k + j]; }
};

//! Automatic backend choice: brute force when n < 64 or d > 15, kd-tree
//! otherwise. Throws InvalidK unless 1 <= k <= n-1, InvalidInput on
//! non-finite entries, DuplicatePoints when any two rows coincide exactly.
NeighborDistances knn_distances(const Eigen::MatrixXd& points, int k);

//! Exhaustive O(n^2 d) scan. Reference backend.
NeighborDistances knn_distances_brute(const Eigen::MatrixXd& points, int k);

//! kd-tree backend (median splits on the widest axis); dispatches to a
//! sorted two-pointer sweep when d == 1.
NeighborDistances knn_distances_tree(const Eigen::MatrixXd& points, int k);

}  // namespace elliptest
