// Weight construction is checked against a hand-written normal-equations
// solve (Gaussian elimination, no shared linear algebra with the SVD route
// in the library), and the estimator itself against closed-form entropies
// and a fully hand-computed three-point example.

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "elliptest/entropy.hpp"
#include "elliptest/errors.hpp"
#include "elliptest/rng.hpp"
#include "elliptest/special.hpp"

using Catch::Matchers::WithinAbs;

namespace {

// Min-norm solution of A w = b restricted to the support: w = A^T (A A^T)^{-1} b,
// with the small square system solved by Gaussian elimination with partial
// pivoting. The normal equations square the condition number, so the whole
// computation runs in long double to keep the oracle well inside 1e-8.
std::vector<double> min_norm_oracle(const std::vector<int>& support, int d) {
  const int rows = 1 + d / 4;
  const int cols = static_cast<int>(support.size());
  std::vector<std::vector<long double>> a(rows, std::vector<long double>(cols));
  for (int c = 0; c < cols; ++c) a[0][c] = 1.0L;
  for (int l = 1; l < rows; ++l) {
    for (int c = 0; c < cols; ++c) {
      const long double j = support[c];
      a[l][c] = std::exp(std::lgamma(static_cast<long double>(j) + 2.0L * l / d) -
                         std::lgamma(static_cast<long double>(j)));
    }
  }

  std::vector<std::vector<long double>> aat(rows, std::vector<long double>(rows + 1, 0.0L));
  for (int r = 0; r < rows; ++r) {
    for (int s = 0; s < rows; ++s) {
      for (int c = 0; c < cols; ++c) aat[r][s] += a[r][c] * a[s][c];
    }
  }
  aat[0][rows] = 1.0L;  // right-hand side (1, 0, ..., 0)

  for (int col = 0; col < rows; ++col) {
    int pivot = col;
    for (int r = col + 1; r < rows; ++r) {
      if (std::abs(aat[r][col]) > std::abs(aat[pivot][col])) pivot = r;
    }
    std::swap(aat[col], aat[pivot]);
    for (int r = col + 1; r < rows; ++r) {
      const long double f = aat[r][col] / aat[col][col];
      for (int s = col; s <= rows; ++s) aat[r][s] -= f * aat[col][s];
    }
  }
  std::vector<long double> lambda(rows);
  for (int r = rows - 1; r >= 0; --r) {
    long double v = aat[r][rows];
    for (int s = r + 1; s < rows; ++s) v -= aat[r][s] * lambda[s];
    lambda[r] = v / aat[r][r];
  }

  std::vector<double> w(cols, 0.0);
  for (int c = 0; c < cols; ++c) {
    long double acc = 0.0L;
    for (int r = 0; r < rows; ++r) acc += a[r][c] * lambda[r];
    w[c] = static_cast<double>(acc);
  }
  return w;
}

Eigen::MatrixXd sample_1d(int n, std::uint64_t seed, char law) {
  elliptest::Rng rng(seed);
  Eigen::MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) {
    switch (law) {
      case 'n': x(i, 0) = rng.normal(); break;
      case 'u': x(i, 0) = rng.uniform_pos(); break;
      default: x(i, 0) = -std::log(rng.uniform_pos()); break;  // Exp(1)
    }
  }
  return x;
}

}  // namespace

TEST_CASE("neighbor-count exponent", "[entropy]") {
  REQUIRE_THAT(elliptest::k_growth_exponent(1), WithinAbs(0.25, 1e-15));
  REQUIRE_THAT(elliptest::k_growth_exponent(2), WithinAbs(0.4, 1e-15));
  REQUIRE_THAT(elliptest::k_growth_exponent(5), WithinAbs(4.0 / 19.0, 1e-15));
  REQUIRE_THAT(elliptest::k_growth_exponent(10), WithinAbs(2.0 / 17.0, 1e-15));
  // Very high dimensions hit the floor.
  REQUIRE_THAT(elliptest::k_growth_exponent(100), WithinAbs(0.05, 1e-15));
}

TEST_CASE("default neighbor counts", "[entropy]") {
  REQUIRE(elliptest::choose_k(2, 500) == 25);
  REQUIRE(elliptest::choose_k(1, 500) == 5);
  REQUIRE(elliptest::choose_k(2, 300) == 20);
  // Clamped to n - 2 for tiny samples.
  REQUIRE(elliptest::choose_k(5, 4) == 2);
  REQUIRE(elliptest::choose_k(1, 3) == 1);
}

TEST_CASE("uniform weights", "[entropy]") {
  const elliptest::WeightVector w = elliptest::uniform_weights(4, 2);
  REQUIRE(w.k == 4);
  REQUIRE(w.d == 2);
  REQUIRE(w.support == std::vector<int>{1, 2, 3, 4});
  for (int i = 0; i < 4; ++i) REQUIRE(w.values[i] == 0.25);
  REQUIRE(std::abs(w.sum_residual) <= 1e-12);
  REQUIRE(w.moment_residuals.size() == 0);
}

TEST_CASE("optimal weights satisfy their constraints", "[entropy]") {
  for (int d = 4; d <= 12; ++d) {
    for (int k : {d, d + 3, 2 * d, 31, 60}) {
      if (k < d) continue;
      INFO("d=" << d << " k=" << k);
      const elliptest::WeightVector w = elliptest::l2_optimal_weights(k, d);
      REQUIRE(std::abs(w.sum_residual) <= 1e-8);
      if (w.moment_residuals.size() > 0) {
        REQUIRE(w.moment_residuals.cwiseAbs().maxCoeff() <= 1e-8);
      }
      REQUIRE(static_cast<int>(w.moment_residuals.size()) == d / 4);

      // Zero off the support, and the support is what the rule says.
      std::vector<int> expected;
      for (int j = 1; j <= d; ++j) {
        int v = (j * k) / d;
        if (v < 1) v = 1;
        if (expected.empty() || expected.back() != v) expected.push_back(v);
      }
      REQUIRE(w.support == expected);
      std::vector<bool> on(k + 1, false);
      for (int s : w.support) on[s] = true;
      for (int i = 1; i <= k; ++i) {
        if (!on[i]) REQUIRE(w.values[i - 1] == 0.0);
      }
    }
  }
}

TEST_CASE("optimal weights are the minimum-norm solution", "[entropy][oracle]") {
  for (int d : {4, 5, 8, 11, 12}) {
    for (int k : {d + 1, 2 * d, 45}) {
      INFO("d=" << d << " k=" << k);
      const elliptest::WeightVector w = elliptest::l2_optimal_weights(k, d);
      const std::vector<double> oracle = min_norm_oracle(w.support, d);
      REQUIRE(oracle.size() == w.support.size());
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        REQUIRE_THAT(w.values[w.support[i] - 1], WithinAbs(oracle[i], 1e-8));
      }
    }
  }
}

TEST_CASE("low dimensions have no moment constraints", "[entropy]") {
  const elliptest::WeightVector w = elliptest::l2_optimal_weights(10, 3);
  REQUIRE(w.moment_residuals.size() == 0);
  REQUIRE(std::abs(w.sum_residual) <= 1e-12);
}

TEST_CASE("infeasible support is rejected", "[entropy]") {
  // d=4, k=1: the support collapses to {1} but there are two constraints.
  REQUIRE_THROWS_AS(elliptest::l2_optimal_weights(1, 4), elliptest::WeightInfeasible);
}

TEST_CASE("weight constructors validate arguments", "[entropy]") {
  REQUIRE_THROWS_AS(elliptest::uniform_weights(0, 2), elliptest::InvalidK);
  REQUIRE_THROWS_AS(elliptest::uniform_weights(3, 0), elliptest::InvalidInput);
  REQUIRE_THROWS_AS(elliptest::l2_optimal_weights(0, 5), elliptest::InvalidK);
}

TEST_CASE("three points by hand", "[entropy][oracle]") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0.0, 1.0, 3.0;
  const elliptest::EntropyEstimate est =
      elliptest::entropy_estimate(pts, 1, elliptest::uniform_weights(1, 1));
  // xi_i = log(n-1) + log rho_i + log 2 - psi(1); rho = (1, 1, 2).
  const double base = std::log(2.0) + std::log(2.0) + elliptest::kEulerGamma;
  REQUIRE_THAT(est.xi[0], WithinAbs(base, 1e-13));
  REQUIRE_THAT(est.xi[1], WithinAbs(base, 1e-13));
  REQUIRE_THAT(est.xi[2], WithinAbs(base + std::log(2.0), 1e-13));
  REQUIRE_THAT(est.h, WithinAbs(base + std::log(2.0) / 3.0, 1e-13));
}

TEST_CASE("estimate is the mean of the per-point terms", "[entropy]") {
  const Eigen::MatrixXd x = sample_1d(500, 21, 'n');
  const elliptest::EntropyEstimate est =
      elliptest::entropy_estimate(x, 5, elliptest::uniform_weights(5, 1));
  double sum = 0.0;
  for (double v : est.xi) sum += v;
  REQUIRE(est.h == sum / 500.0);
  REQUIRE(est.xi.size() == 500);
  REQUIRE(est.k == 5);
}

TEST_CASE("closed-form entropies are recovered", "[entropy]") {
  const int n = 4000;
  const int k1 = elliptest::choose_k(1, n);
  const elliptest::WeightVector w1 = elliptest::uniform_weights(k1, 1);

  const double h_normal = elliptest::entropy_estimate(sample_1d(n, 301, 'n'), k1, w1).h;
  REQUIRE_THAT(h_normal, WithinAbs(0.5 * std::log(2.0 * M_PI * std::exp(1.0)), 0.05));

  const double h_uniform = elliptest::entropy_estimate(sample_1d(n, 302, 'u'), k1, w1).h;
  REQUIRE_THAT(h_uniform, WithinAbs(0.0, 0.05));

  const double h_exp = elliptest::entropy_estimate(sample_1d(n, 303, 'e'), k1, w1).h;
  REQUIRE_THAT(h_exp, WithinAbs(1.0, 0.05));

  elliptest::Rng rng(304);
  Eigen::MatrixXd g2(n, 2);
  for (int i = 0; i < n; ++i) {
    g2(i, 0) = rng.normal();
    g2(i, 1) = rng.normal();
  }
  const int k2 = elliptest::choose_k(2, n);
  const double h_g2 = elliptest::entropy_estimate(g2, k2, elliptest::uniform_weights(k2, 2)).h;
  REQUIRE_THAT(h_g2, WithinAbs(std::log(2.0 * M_PI * std::exp(1.0)), 0.08));
}

TEST_CASE("scaling shifts the estimate by d log a", "[entropy]") {
  elliptest::Rng rng(77);
  Eigen::MatrixXd x(300, 2);
  for (int i = 0; i < 300; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
  }
  const int k = 9;
  const elliptest::WeightVector w = elliptest::uniform_weights(k, 2);
  const double h = elliptest::entropy_estimate(x, k, w).h;
  // a = 2 scales every distance exactly, so the identity is near-exact.
  const double h2 = elliptest::entropy_estimate(2.0 * x, k, w).h;
  REQUIRE_THAT(h2, WithinAbs(h + 2.0 * std::log(2.0), 1e-10));
  const double h3 = elliptest::entropy_estimate(1.7 * x, k, w).h;
  REQUIRE_THAT(h3, WithinAbs(h + 2.0 * std::log(1.7), 1e-9));
}

TEST_CASE("dyadic translation leaves the estimate bitwise unchanged", "[entropy]") {
  elliptest::Rng rng(78);
  Eigen::MatrixXd x(200, 2);
  for (int i = 0; i < 200; ++i) {
    // Round to a dyadic grid so the shift below is exact in floating point.
    x(i, 0) = std::round(rng.normal() * 1048576.0) / 1048576.0;
    x(i, 1) = std::round(rng.normal() * 1048576.0) / 1048576.0;
  }
  const int k = 7;
  const elliptest::WeightVector w = elliptest::uniform_weights(k, 2);
  const elliptest::EntropyEstimate a = elliptest::entropy_estimate(x, k, w);
  Eigen::MatrixXd shifted = x;
  shifted.col(0).array() += 0.5;
  shifted.col(1).array() -= 2.0;
  const elliptest::EntropyEstimate b = elliptest::entropy_estimate(shifted, k, w);
  REQUIRE(a.h == b.h);
  REQUIRE(a.xi == b.xi);
}

TEST_CASE("estimator validates its inputs", "[entropy]") {
  const Eigen::MatrixXd x = sample_1d(50, 9, 'n');
  const elliptest::WeightVector w3 = elliptest::uniform_weights(3, 1);
  REQUIRE_THROWS_AS(elliptest::entropy_estimate(x, 5, w3), elliptest::InvalidInput);
  const elliptest::WeightVector wrong_d = elliptest::uniform_weights(5, 2);
  REQUIRE_THROWS_AS(elliptest::entropy_estimate(x, 5, wrong_d), elliptest::InvalidInput);
  // k up to n - 1 is legal; k == n is not.
  REQUIRE_THROWS_AS(elliptest::entropy_estimate(x, 50, elliptest::uniform_weights(50, 1)),
                    elliptest::InvalidK);

  Eigen::MatrixXd dup = x;
  dup.row(10) = dup.row(20);
  REQUIRE_THROWS_AS(elliptest::entropy_estimate(dup, 3, w3), elliptest::DuplicatePoints);
}
