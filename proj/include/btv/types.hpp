#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace btv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix or vector does not have the shape its role requires.
class DimensionError : public Error {
 public:
  DimensionError(std::string name, const std::string& what)
      : Error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A value violates a domain invariant (lb > ub, non-symmetric Q, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// The state matrix is not Hurwitz within the stability margin.
class NotHurwitzError : public Error {
 public:
  using Error::Error;
};

/// Gramian is numerically singular: the realization is not minimal.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// A decomposition or solve failed or produced non-finite output.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed manifest, MatrixMarket file or JSON document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A computation was refused because its cost exceeds a configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace btv
