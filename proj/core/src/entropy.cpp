#include "elliptest/entropy.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "elliptest/errors.hpp"
#include "elliptest/knn.hpp"
#include "elliptest/special.hpp"

namespace elliptest {

double k_growth_exponent(int d) {
  if (d < 1) {
    throw InvalidInput("k_growth_exponent requires dimension >= 1");
  }
  if (d == 1) {
    return 0.25;
  }
  const double rate_bound = 4.0 / (4.0 + 3.0 * static_cast<double>(d));
  const double bias_bound =
      1.0 - (static_cast<double>(d) / 4.0) / (1.0 + static_cast<double>(d / 4));
  return std::max(std::min(rate_bound, bias_bound), 0.05);
}

int choose_k(int d, int n) {
  if (n < 3) {
    throw InvalidInput("choose_k requires n >= 3");
  }
  const double raw = static_cast<double>(d) * std::pow(static_cast<double>(n), k_growth_exponent(d));
  int k = static_cast<int>(std::ceil(raw));
  k = std::max(k, 1);
  k = std::min(k, n - 2);
  return k;
}

namespace {

// Gamma(j + delta) / Gamma(j), evaluated in the log domain.
double gamma_ratio(int j, double delta) {
  return std::exp(std::lgamma(static_cast<double>(j) + delta) - std::lgamma(static_cast<double>(j)));
}

void fill_residuals(WeightVector& w) {
  w.sum_residual = w.values.sum() - 1.0;
  const int constraints = w.d / 4;
  w.moment_residuals.resize(constraints);
  for (int l = 1; l <= constraints; ++l) {
    const double delta = 2.0 * static_cast<double>(l) / static_cast<double>(w.d);
    double acc = 0.0;
    for (int j = 1; j <= w.k; ++j) {
      if (w.values[j - 1] != 0.0) {
        acc += w.values[j - 1] * gamma_ratio(j, delta);
      }
    }
    w.moment_residuals[l - 1] = acc;
  }
}

void check_weight_args(int k, int d) {
  if (k < 1) {
    throw InvalidK("weights require k >= 1");
  }
  if (d < 1) {
    throw InvalidInput("weights require dimension >= 1");
  }
}

}  // namespace

WeightVector uniform_weights(int k, int d) {
  check_weight_args(k, d);
  WeightVector w;
  w.k = k;
  w.d = d;
  w.values = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  w.support.resize(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    w.support[static_cast<std::size_t>(j - 1)] = j;
  }
  fill_residuals(w);
  return w;
}

WeightVector l2_optimal_weights(int k, int d) {
  check_weight_args(k, d);

  std::vector<int> support;
  for (int j = 1; j <= d; ++j) {
    const long long raw = static_cast<long long>(j) * k / d;
    const int idx = static_cast<int>(std::clamp<long long>(raw, 1, k));
    if (support.empty() || support.back() != idx) {
      support.push_back(idx);
    }
  }

  const int m = static_cast<int>(support.size());
  const int constraints = 1 + d / 4;
  Eigen::MatrixXd a(constraints, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(constraints);
  b[0] = 1.0;
  for (int t = 0; t < m; ++t) {
    a(0, t) = 1.0;
  }
  for (int l = 1; l < constraints; ++l) {
    const double delta = 2.0 * static_cast<double>(l) / static_cast<double>(d);
    for (int t = 0; t < m; ++t) {
      a(l, t) = gamma_ratio(support[static_cast<std::size_t>(t)], delta);
    }
  }

  // Minimum-norm solution of the (typically underdetermined) constraint
  // system; singular values below 1e-12 * sigma_max are treated as zero.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  const Eigen::VectorXd w_support = svd.solve(b);

  const Eigen::VectorXd residual = a * w_support - b;
  if (residual.cwiseAbs().maxCoeff() > 1e-8) {
    throw WeightInfeasible("weight constraints infeasible for k=" + std::to_string(k) +
                           ", d=" + std::to_string(d) +
                           " (max residual " + std::to_string(residual.cwiseAbs().maxCoeff()) + ")");
  }

  WeightVector w;
  w.k = k;
  w.d = d;
  w.values = Eigen::VectorXd::Zero(k);
  for (int t = 0; t < m; ++t) {
    w.values[support[static_cast<std::size_t>(t)] - 1] = w_support[t];
  }
  w.support = std::move(support);
  fill_residuals(w);
  return w;
}

EntropyEstimate entropy_estimate(const Eigen::MatrixXd& points, int k, const WeightVector& weights) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (weights.k != k || weights.values.size() != k) {
    throw InvalidInput("entropy_estimate: weight vector does not match k");
  }
  if (weights.d != d) {
    throw InvalidInput("entropy_estimate: weight vector dimension does not match the sample");
  }

  const NeighborDistances rho = knn_distances(points, k);

  const double log_vd = log_unit_ball_volume(d);
  const double log_nm1 = std::log(static_cast<double>(n - 1));
  std::vector<double> psi(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j : weights.support) {
    psi[static_cast<std::size_t>(j)] = digamma(static_cast<double>(j));
  }

  EntropyEstimate out;
  out.k = k;
  out.weights = weights;
  out.xi.resize(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double xi = 0.0;
    for (int j : weights.support) {
      const double w = weights.values[j - 1];
      xi += w * (log_nm1 + static_cast<double>(d) * std::log(rho(i, j - 1)) + log_vd -
                 psi[static_cast<std::size_t>(j)]);
    }
    if (!std::isfinite(xi)) {
      throw InvalidInput("entropy_estimate: non-finite log-distance term at row " +
                         std::to_string(i));
    }
    out.xi[static_cast<std::size_t>(i)] = xi;
    acc += xi;
  }
  out.h = acc / static_cast<double>(n);
  return out;
}

}  // namespace elliptest
