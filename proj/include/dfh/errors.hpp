#pragma once

#include "dfh/types.hpp"

#include <stdexcept>
#include <string>

namespace dfh {

/// Base of the numerical failures raised by the library. Precondition
/// violations on arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A direction set failed a full-row-rank requirement.
class RankDeficientError : public Error {
 public:
  RankDeficientError(std::string set_name, std::size_t rank, std::size_t required);

  const std::string& set_name() const noexcept { return set_name_; }
  std::size_t rank() const noexcept { return rank_; }

 private:
  std::string set_name_;
  std::size_t rank_;
};

/// A square system that must be solved exactly is singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// The quadratic interpolation system over a point set is singular.
class NotPoisedError : public Error {
 public:
  using Error::Error;
};

/// The user oracle threw or returned a non-finite value.
class OracleError : public Error {
 public:
  OracleError(const Vector& point, const std::string& reason);

  const Vector& point() const noexcept { return point_; }

 private:
  Vector point_;
};

/// Quotient rule evaluated where the denominator vanishes.
class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search requested beyond its supported dimension.
class SearchBoundExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace dfh
