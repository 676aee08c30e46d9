#pragma once

//! Weighted nearest-neighbor differential entropy estimation.
//!
//! The estimator averages, over sample points, weighted log nearest-neighbor
//! distance terms: for point i and neighbor order j,
//!   log[(n-1) rho_{(j),i}^d V_d] - psi(j),
//! with V_d the unit-ball volume and psi the digamma function. Uniform
//! weights give the classical estimator; in higher dimensions a sparse
//! weight vector cancels the leading bias terms and restores the parametric
//! rate.

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace elliptest {

//! Exponent tau(d) of the neighbor-count rule k = ceil(d * n^tau(d)),
//! floored at 1/20.
double k_growth_exponent(int d);

//! Default neighbor count for an entropy estimate in dimension d from n
//! points: ceil(d * n^tau(d)) clamped to [1, n-2].
int choose_k(int d, int n);

struct WeightVector {
  int k = 0;
  int d = 0;
  Eigen::VectorXd values;            // length k; zero off the support
  std::vector<int> support;          // ascending 1-based neighbor orders with nonzero weight
  double sum_residual = 0.0;         // sum(values) - 1
  Eigen::VectorXd moment_residuals;  // one per moment constraint l = 1..floor(d/4)
};

//! Uniform weights 1/k on all orders 1..k. Constraint residuals are reported,
//! not enforced; in low dimensions there are no moment constraints and the
//! uniform vector is already optimal.
WeightVector uniform_weights(int k, int d);

//! Minimum-norm weights on the sparse support {floor(j*k/d): j = 1..d}
//! (clamped to >= 1, deduplicated) satisfying sum w = 1 and, for each
//! l = 1..floor(d/4), sum_j w_j Gamma(j + 2l/d)/Gamma(j) = 0. Solved by SVD
//! pseudo-inverse with singular values below 1e-12 * sigma_max treated as
//! zero. Throws WeightInfeasible when the constraints cannot be met within
//! 1e-8.
WeightVector l2_optimal_weights(int k, int d);

struct EntropyEstimate {
  double h = 0.0;               // the entropy estimate, mean of xi
  std::vector<double> xi;       // per-point weighted log-distance terms
  int k = 0;
  WeightVector weights;
};

//! Weighted nearest-neighbor entropy estimate of the sample (rows = points).
//! Pre: weights.k == k, 1 <= k <= n-1, finite coordinates, no duplicate rows.
//! The mean over xi runs in row order, so the result is deterministic.
EntropyEstimate entropy_estimate(const Eigen::MatrixXd& points, int k, const WeightVector& weights);

}  // namespace elliptest
