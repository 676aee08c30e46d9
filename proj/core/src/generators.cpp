#include "elliptest/generators.hpp"

#include <cmath>
#include <string>

#include "elliptest/errors.hpp"
#include "elliptest/rng.hpp"

namespace elliptest {

namespace {

void validate(const SettingSpec& spec) {
  if (spec.setting < 1 || spec.setting > 4) {
    throw InvalidInput("setting must be 1..4, got " + std::to_string(spec.setting));
  }
  if (spec.n < 1 || spec.p < 1) {
    throw InvalidInput("generators require n >= 1 and p >= 1");
  }
  if (spec.s < 0 || spec.s > spec.p) {
    throw InvalidInput("generators require 0 <= s <= p, got s=" + std::to_string(spec.s) +
                       " with p=" + std::to_string(spec.p));
  }
}

constexpr double kDivisorFloor = 1e-3;

}  // namespace

Eigen::MatrixXd gen_setting1(const SettingSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  Eigen::MatrixXd x(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.p; ++j) {
      if (j < spec.s) {
        // (chi^2(2) - 2)/2: mean 0, variance 1, skewness 2.
        x(i, j) = 0.5 * (rng.chi_squared_2() - 2.0);
      } else {
        x(i, j) = rng.normal();
      }
    }
  }
  return x;
}

Eigen::MatrixXd gen_setting2(const SettingSpec& spec, Truncation truncation,
                             const std::vector<double>& shapes, const std::vector<double>& rates) {
  validate(spec);
  static const std::vector<double> default_shapes = {0.5, 2.0, 0.4, 3.0, 0.3,
                                                     4.0, 0.2, 5.0, 0.1, 6.0};
  static const std::vector<double> default_rates = {1.0, 2.0, 3.0, 0.1, 0.2,
                                                    0.3, 4.0, 5.0, 0.4, 0.5};
  const std::vector<double>& g = shapes.empty() ? default_shapes : shapes;
  const std::vector<double>& a = rates.empty() ? default_rates : rates;
  if (g.size() != a.size()) {
    throw InvalidInput("setting 2 shape and rate vectors must have equal length");
  }
  if (static_cast<std::size_t>(spec.s) > g.size()) {
    throw InvalidInput("setting 2 supports s <= " + std::to_string(g.size()) +
                       " with the given shape/rate vectors, got s=" + std::to_string(spec.s));
  }

  Rng rng(spec.seed);
  Eigen::MatrixXd x(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) {
    const double u = rng.gamma(4.0, 2.0);
    const Eigen::VectorXd v = rng.sphere(spec.p);
    for (int j = 0; j < spec.p; ++j) {
      if (j < spec.s) {
        double w = rng.gamma(g[static_cast<std::size_t>(j)], a[static_cast<std::size_t>(j)]);
        if (truncation == Truncation::Clamp) {
          w = std::max(w, kDivisorFloor);
        } else {
          while (w < kDivisorFloor) {
            w = rng.gamma(g[static_cast<std::size_t>(j)], a[static_cast<std::size_t>(j)]);
          }
        }
        x(i, j) = u * v[j] / std::sqrt(w);
      } else {
        x(i, j) = u * v[j];
      }
    }
  }
  return x;
}

Eigen::MatrixXd gen_setting3(const SettingSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  Eigen::MatrixXd x(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) {
    const Eigen::VectorXd v = rng.sphere(spec.p);
    double shift = 0.0;
    for (int j = 1; j <= spec.s; ++j) {
      shift += static_cast<double>(j) * static_cast<double>(j) * v[j - 1] * v[j - 1];
    }
    const double u = shift + rng.uniform();
    x.row(i) = (u * v).transpose();
  }
  return x;
}

Eigen::MatrixXd gen_setting4(const SettingSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  Eigen::MatrixXd x(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) {
    // Multivariate t(6): one chi-square(6) mixing draw shared across the row.
    Eigen::VectorXd z(spec.p);
    for (int j = 0; j < spec.p; ++j) {
      z[j] = rng.normal();
    }
    const double mix = std::sqrt(rng.chi_squared_6() / 6.0);
    const double shift = (rng.uniform() < 0.5) ? 20.0 : 0.0;
    for (int j = 0; j < spec.p; ++j) {
      x(i, j) = z[j] / mix + (j < spec.s ? shift : 0.0);
    }
  }
  return x;
}

Eigen::MatrixXd generate(const SettingSpec& spec, Truncation truncation) {
  validate(spec);
  switch (spec.setting) {
    case 1:
      return gen_setting1(spec);
    case 2:
      return gen_setting2(spec, truncation);
    case 3:
      return gen_setting3(spec);
    default:
      return gen_setting4(spec);
  }
}

}  // namespace elliptest
