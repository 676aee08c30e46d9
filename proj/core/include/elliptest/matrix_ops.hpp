#pragma once

//! Dense symmetric-matrix kernels: cyclic Jacobi eigendecomposition, matrix
//! square roots, and the influence matrices of the plug-in moment estimators.
//! Everything here is deterministic: fixed sweep order, fixed tie-breaking,
//! no randomized pivoting.

#include <Eigen/Core>

namespace elliptest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct EigenDecomp {
  Vector values;   // descending; ties keep the lower original index first
  Matrix vectors;  // orthonormal columns, S = vectors * values.asDiagonal() * vectors^T
};

//! Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
//! Sweeps run in fixed (i, j) order until the off-diagonal Frobenius mass
//! falls below 1e-12 times the input's Frobenius norm.
//! Pre: square, finite, symmetric within 1e-12 * max|S|.
EigenDecomp sym_eig(const Matrix& s);

//! Symmetric square root Q diag(lambda^{1/2}) Q^T.
//! Throws NotPositiveDefinite when the smallest eigenvalue is <= 1e-10 times
//! the largest.
Matrix mat_sqrt(const Matrix& s);

//! Symmetric inverse square root Q diag(lambda^{-1/2}) Q^T; same domain
//! checks as mat_sqrt.
Matrix mat_inv_sqrt(const Matrix& s);

struct InfluenceMats {
  Vector psi_mu;              // x - mu
  Matrix psi_sigma;           // (x - mu)(x - mu)^T - sigma
  Matrix psi_sigma_inv_half;  // influence of the inverse square root
};

//! Solves the Sylvester-type system behind psi_sigma_inv_half for a fixed
//! sigma: the matrix M with sigma M sigma^{1/2} + sigma^{1/2} M sigma =
//! psi_sigma, returned negated. Working in sigma's eigenbasis reduces the
//! p^2 x p^2 Kronecker system to an entrywise divide by
//! lambda_i^{1/2} lambda_j + lambda_i lambda_j^{1/2}.
class InfluenceSolver {
public:
  explicit InfluenceSolver(const Matrix& sigma);

  //! psi_sigma_inv_half for the given psi_sigma.
  Matrix solve(const Matrix& psi_sigma) const;

  InfluenceMats influence(const Vector& x, const Vector& mu) const;

  const Matrix& sigma() const { return sigma_; }

private:
  Matrix sigma_;
  EigenDecomp eig_;
  Vector sqrt_values_;
};

//! One-shot form of InfluenceSolver::influence. sigma_half must equal
//! mat_sqrt(sigma); it is validated for shape only, since the eigenbasis
//! solve derives both roots from sigma itself.
InfluenceMats influence_mats(const Vector& x, const Vector& mu, const Matrix& sigma,
                             const Matrix& sigma_half);

}  // namespace elliptest
