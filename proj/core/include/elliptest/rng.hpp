#pragma once

//! Deterministic random number generation. A hand-rolled xoshiro256++ core
//! with splitmix64 seeding keeps every stream reproducible across platforms
//! and standard-library versions; std::mt19937 distributions are not bitwise
//! portable, which this library's byte-identical-output contract requires.

#include <array>
#include <cstdint>
#include <initializer_list>

#include <Eigen/Core>

namespace elliptest {

//! splitmix64 step; also used as the mixing function for seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

//! Collapse a list of values into one well-mixed 64-bit seed. Used to derive
//! independent substreams, e.g. per replication or per grid cell.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  //! Uniform on [0, 1) with 53-bit resolution.
  double uniform();

  //! Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos();

  //! Standard normal via the Marsaglia polar method (no trig calls).
  double normal();

  //! Gamma(shape, rate) via Marsaglia-Tsang squeeze, with the u^{1/shape}
  //! boost for shape < 1. Requires shape > 0, rate > 0.
  double gamma(double shape, double rate);

  //! Chi-square(2) drawn exactly as -2 log(U).
  double chi_squared_2();

  //! Chi-square(6) drawn exactly as -2 log(U1 U2 U3).
  double chi_squared_6();

  //! Uniform point on the unit sphere in R^p (p >= 1).
  Eigen::VectorXd sphere(int p);

private:
  std::array<std::uint64_t, 4> s_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

//! Add independent Uniform(-eps, eps) noise to every entry, seeded
//! deterministically. Used to break exact duplicates before kNN stages.
void apply_jitter(Eigen::MatrixXd& points, double eps, std::uint64_t seed);

}  // namespace elliptest
