#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace elliptest {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or out-of-domain input (non-finite data, bad dimensions, bad config).
class InvalidInput : public Error {
public:
  using Error::Error;
};

// Neighbor count outside [1, n-1].
class InvalidK : public Error {
public:
  using Error::Error;
};

// Symmetric matrix is not positive definite at the required tolerance.
class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

// Two identical points make a nearest-neighbor distance zero; log-distance
// terms would be -inf. Carries the offending index pairs (0-based).
class DuplicatePoints : public Error {
public:
  DuplicatePoints(const std::string& msg, std::vector<std::pair<int, int>> pairs)
      : Error(msg), pairs_(std::move(pairs)) {}
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

private:
  std::vector<std::pair<int, int>> pairs_;
};

// An observation coincides exactly with the location parameter, so its
// direction on the sphere is undefined. Carries the offending row (0-based).
class DegenerateDirection : public Error {
public:
  DegenerateDirection(const std::string& msg, int row) : Error(msg), row_(row) {}
  int row() const { return row_; }

private:
  int row_;
};

// The moment constraints defining the L2-optimal weights have no solution on
// the given support.
class WeightInfeasible : public Error {
public:
  using Error::Error;
};

// CSV/config parse failure. Row and column are 1-based file coordinates.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int row, int col) : Error(msg), row_(row), col_(col) {}
  int row() const { return row_; }
  int col() const { return col_; }

private:
  int row_ = 0;
  int col_ = 0;
};

}  // namespace elliptest
