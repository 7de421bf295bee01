#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace quartic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or input-format violation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// T(I,w,w,w) vanished, so the power iteration cannot normalize.
class DegenerateIterate : public Error {
 public:
  using Error::Error;
};

/// Gram matrix of the components is numerically singular.
class DegenerateComponents : public Error {
 public:
  using Error::Error;
};

/// Every restart of a deflation round degenerated.
class ExtractionFailure : public Error {
 public:
  ExtractionFailure(std::size_t round, const std::string& what)
      : Error(what), round_(round) {}
  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

class NoFeasibleRestarts : public Error {
 public:
  using Error::Error;
};

/// Backtracking could not find a non-increasing step. Carries the last iterate.
class StalledDescent : public Error {
 public:
  StalledDescent(Eigen::VectorXd point, const std::string& what)
      : Error(what), point_(std::move(point)) {}
  const Eigen::VectorXd& point() const noexcept { return point_; }

 private:
  Eigen::VectorXd point_;
};

}  // namespace quartic
