#include "elliptest/matrix_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "elliptest/errors.hpp"

namespace elliptest {

namespace {

void check_symmetric_input(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() < 1) {
    throw InvalidInput("sym_eig requires a non-empty square matrix");
  }
  if (!s.allFinite()) {
    throw InvalidInput("sym_eig requires finite entries");
  }
  const double scale = s.cwiseAbs().maxCoeff();
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0)) {
    throw InvalidInput("sym_eig requires a symmetric matrix");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) {
        sum += a(i, j) * a(i, j);
      }
    }
  }
  return std::sqrt(sum);
}

}  // namespace

EigenDecomp sym_eig(const Matrix& s) {
  check_symmetric_input(s);
  const int p = static_cast<int>(s.rows());

  Matrix a = 0.5 * (s + s.transpose());
  Matrix q = Matrix::Identity(p, p);
  const double target = 1e-12 * std::max(a.norm(), 1e-300);

  const int max_sweeps = 64;
  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (++sweep > max_sweeps) {
      throw Error("sym_eig: Jacobi sweeps failed to converge");
    }
    for (int i = 0; i < p - 1; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const double apq = a(i, j);
        if (apq == 0.0) {
          continue;
        }
        const double tau = (a(j, j) - a(i, i)) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;

        const double aii = a(i, i);
        const double ajj = a(j, j);
        a(i, i) = aii - t * apq;
        a(j, j) = ajj + t * apq;
        a(i, j) = 0.0;
        a(j, i) = 0.0;
        for (int k = 0; k < p; ++k) {
          if (k == i || k == j) {
            continue;
          }
          const double aik = a(i, k);
          const double ajk = a(j, k);
          a(i, k) = c * aik - sn * ajk;
          a(k, i) = a(i, k);
          a(j, k) = sn * aik + c * ajk;
          a(k, j) = a(j, k);
        }
        for (int k = 0; k < p; ++k) {
          const double qki = q(k, i);
          const double qkj = q(k, j);
          q(k, i) = c * qki - sn * qkj;
          q(k, j) = sn * qki + c * qkj;
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int lhs, int rhs) { return a(lhs, lhs) > a(rhs, rhs); });

  EigenDecomp out;
  out.values.resize(p);
  out.vectors.resize(p, p);
  for (int k = 0; k < p; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = q.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

namespace {

// Shared body of mat_sqrt / mat_inv_sqrt: Q diag(lambda^exponent) Q^T after a
// positive-definiteness check at relative tolerance 1e-10.
Matrix symmetric_power(const Matrix& s, double exponent, const char* op_name) {
  const EigenDecomp eig = sym_eig(s);
  const double lambda_max = eig.values[0];
  const double tol = 1e-10 * std::max(lambda_max, 0.0);
  const double lambda_min = eig.values[eig.values.size() - 1];
  if (!(lambda_min > tol)) {
    throw NotPositiveDefinite(std::string(op_name) +
                              ": matrix is not positive definite at tolerance 1e-10");
  }
  Vector powered = eig.values;
  for (Eigen::Index k = 0; k < powered.size(); ++k) {
    powered[k] = std::pow(powered[k], exponent);
  }
  Matrix r = eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace

Matrix mat_sqrt(const Matrix& s) {
  return symmetric_power(s, 0.5, "mat_sqrt");
}

Matrix mat_inv_sqrt(const Matrix& s) {
  return symmetric_power(s, -0.5, "mat_inv_sqrt");
}

InfluenceSolver::InfluenceSolver(const Matrix& sigma) : sigma_(sigma), eig_(sym_eig(sigma)) {
  const double tol = 1e-10 * std::max(eig_.values[0], 0.0);
  if (!(eig_.values[eig_.values.size() - 1] > tol)) {
    throw NotPositiveDefinite("InfluenceSolver: sigma is not positive definite");
  }
  sqrt_values_ = eig_.values.cwiseSqrt();
}

Matrix InfluenceSolver::solve(const Matrix& psi_sigma) const {
  const Eigen::Index p = sigma_.rows();
  if (psi_sigma.rows() != p || psi_sigma.cols() != p) {
    throw InvalidInput("InfluenceSolver::solve: dimension mismatch");
  }
  const Matrix b = eig_.vectors.transpose() * psi_sigma * eig_.vectors;
  Matrix c(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      c(i, j) = b(i, j) / (sqrt_values_[i] * eig_.values[j] + eig_.values[i] * sqrt_values_[j]);
    }
  }
  const Matrix m = eig_.vectors * c * eig_.vectors.transpose();
  // The transpose must not alias the destination, so build a fresh matrix.
  Matrix out = -0.5 * (m + m.transpose());
  return out;
}

InfluenceMats InfluenceSolver::influence(const Vector& x, const Vector& mu) const {
  if (x.size() != sigma_.rows() || mu.size() != sigma_.rows()) {
    throw InvalidInput("influence: dimension mismatch");
  }
  InfluenceMats out;
  out.psi_mu = x - mu;
  out.psi_sigma = out.psi_mu * out.psi_mu.transpose() - sigma_;
  out.psi_sigma_inv_half = solve(out.psi_sigma);
  return out;
}

InfluenceMats influence_mats(const Vector& x, const Vector& mu, const Matrix& sigma,
                             const Matrix& sigma_half) {
  if (sigma_half.rows() != sigma.rows() || sigma_half.cols() != sigma.cols()) {
    throw InvalidInput("influence_mats: sigma_half shape mismatch");
  }
  return InfluenceSolver(sigma).influence(x, mu);
}

}  // namespace elliptest
