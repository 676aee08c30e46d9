#include "elliptest/rng.hpp"

#include <cmath>

#include "elliptest/errors.hpp"

namespace elliptest {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x243F6A8885A308D3ull;  // arbitrary non-zero start
  std::uint64_t out = 0;
  for (std::uint64_t p : parts) {
    state ^= p + 0x9E3779B97F4A7C15ull + (state << 6) + (state >> 2);
    out = splitmix64(state);
  }
  return out;
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) {
    word = splitmix64(sm);
  }
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

std::uint64_t Rng::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * m;
  has_cached_normal_ = true;
  return u * m;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw InvalidInput("gamma requires shape > 0 and rate > 0");
  }
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^{1/a}.
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform_pos(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v / rate;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v / rate;
    }
  }
}

double Rng::chi_squared_2() {
  return -2.0 * std::log(uniform_pos());
}

double Rng::chi_squared_6() {
  return -2.0 * std::log(uniform_pos() * uniform_pos() * uniform_pos());
}

Eigen::VectorXd Rng::sphere(int p) {
  if (p < 1) {
    throw InvalidInput("sphere requires dimension >= 1");
  }
  Eigen::VectorXd z(p);
  for (;;) {
    for (int j = 0; j < p; ++j) {
      z[j] = normal();
    }
    const double norm = z.norm();
    if (norm > 0.0) {
      return z / norm;
    }
  }
}

void apply_jitter(Eigen::MatrixXd& points, double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) {
    throw InvalidInput("jitter half-width must be > 0");
  }
  Rng rng(mix_seed({seed, 0x6A177E72ull}));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      points(i, j) += eps * (2.0 * rng.uniform() - 1.0);
    }
  }
}

}  // namespace elliptest
