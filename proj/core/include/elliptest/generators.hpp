#pragma once

//! Synthetic data generators for the simulation study. Setting 1 is a
//! coordinate-independent design (elliptical only when every column is
//! Gaussian, i.e. s = 0); Settings 2-4 perturb spherically symmetric laws in
//! their first s coordinates. In all four, s = 0 satisfies the null and
//! s > 0 departs from it.

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace elliptest {

struct SettingSpec {
  int setting = 1;  // 1..4
  int n = 0;        // rows
  int p = 0;        // columns
  int s = 0;        // number of perturbed coordinates, 0 <= s <= p
  std::uint64_t seed = 0;
};

//! How Setting 2 keeps its Gamma divisors away from zero: clamp at 1e-3
//! (default) or redraw until above it.
enum class Truncation { Clamp, Reject };

//! First s columns iid (chi^2(2) - 2)/2, remaining columns iid N(0, 1).
//! Every column has mean 0 and variance 1.
Eigen::MatrixXd gen_setting1(const SettingSpec& spec);

//! X_j = U V_j / sqrt(W_j) for j <= s and U V_j otherwise, with
//! U ~ Gamma(4, rate 2), V uniform on the sphere, and the W_j independent
//! Gamma(gamma_j, rate alpha_j) truncated below at 1e-3. Default shape/rate
//! vectors cover s <= 10; custom vectors may be supplied.
Eigen::MatrixXd gen_setting2(const SettingSpec& spec, Truncation truncation = Truncation::Clamp,
                             const std::vector<double>& shapes = {},
                             const std::vector<double>& rates = {});

//! X = U V with V uniform on the sphere and U | V uniform on
//! (sum_{j<=s} j^2 V_j^2, sum_{j<=s} j^2 V_j^2 + 1).
Eigen::MatrixXd gen_setting3(const SettingSpec& spec);

//! X_j = 20 W + Z_j for j <= s and Z_j otherwise, where Z is multivariate t
//! with 6 degrees of freedom (one mixing draw per row) and W ~ Bernoulli(1/2)
//! per row.
Eigen::MatrixXd gen_setting4(const SettingSpec& spec);

//! Dispatch on spec.setting.
Eigen::MatrixXd generate(const SettingSpec& spec, Truncation truncation = Truncation::Clamp);

}  // namespace elliptest
