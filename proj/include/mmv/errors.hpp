#pragma once

#include <stdexcept>
#include <string>

namespace mmv {

// Input lies outside the mathematical domain of an operation
// (non-SPD matrix, parameter below its bound, block outside the unit ball).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An SPD matrix whose smallest eigenvalue falls below the relative floor.
class NearSingularError : public DomainError {
 public:
  NearSingularError(const std::string& what, double eigenvalue)
      : DomainError(what), eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

// Structurally invalid input: wrong dimensions, wrong number of blocks.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mmv
