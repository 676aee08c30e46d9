#pragma once

//! One-dimensional Gaussian kernel density estimate with exact summation.
//! Used for the log-density derivative ratio f'/f of the radial variable
//! inside the variance estimators.

#include <Eigen/Core>
#include <optional>

namespace elliptest {

class Kde1d {
public:
  //! Fit to a sample (n >= 2, finite). Default bandwidth n^{-1/5}.
  explicit Kde1d(const Eigen::VectorXd& sample, std::optional<double> bandwidth = std::nullopt);

  //! Density estimate (nh)^{-1} sum K((u - U_k)/h) with K the standard
  //! normal kernel.
  double density(double u) const;

  //! Density derivative (nh^2)^{-1} sum K'((u - U_k)/h), K'(t) = -t K(t).
  double derivative(double u) const;

  //! f'/f with the density floored at 1e-12 and the ratio clipped to
  //! [-10/h, 10/h], keeping near-empty regions from blowing up variance
  //! plug-ins.
  double log_density_ratio(double u) const;

  double bandwidth() const { return h_; }

private:
  Eigen::VectorXd sample_;
  double h_;
};

}  // namespace elliptest
