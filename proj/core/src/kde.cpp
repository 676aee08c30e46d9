#include "elliptest/kde.hpp"

#include <algorithm>
#include <cmath>

#include "elliptest/errors.hpp"

namespace elliptest {

namespace {
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * M_PI);
}

Kde1d::Kde1d(const Eigen::VectorXd& sample, std::optional<double> bandwidth) : sample_(sample) {
  if (sample_.size() < 2) {
    throw InvalidInput("Kde1d requires at least 2 sample points");
  }
  if (!sample_.allFinite()) {
    throw InvalidInput("Kde1d requires finite sample values");
  }
  if (bandwidth.has_value()) {
    if (!(*bandwidth > 0.0) || !std::isfinite(*bandwidth)) {
      throw InvalidInput("Kde1d bandwidth must be finite and > 0");
    }
    h_ = *bandwidth;
  } else {
    h_ = std::pow(static_cast<double>(sample_.size()), -0.2);
  }
}

double Kde1d::density(double u) const {
  const Eigen::Index n = sample_.size();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = (u - sample_[k]) / h_;
    acc += std::exp(-0.5 * t * t);
  }
  return acc * kInvSqrt2Pi / (static_cast<double>(n) * h_);
}

double Kde1d::derivative(double u) const {
  const Eigen::Index n = sample_.size();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = (u - sample_[k]) / h_;
    acc += -t * std::exp(-0.5 * t * t);
  }
  return acc * kInvSqrt2Pi / (static_cast<double>(n) * h_ * h_);
}

double Kde1d::log_density_ratio(double u) const {
  const double f = std::max(density(u), 1e-12);
  const double ratio = derivative(u) / f;
  const double cap = 10.0 / h_;
  return std::clamp(ratio, -cap, cap);
}

}  // namespace elliptest
