#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mindist {

/// Malformed or inconsistent user input (dimensions, non-SPD matrix, bad file).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of the canonical function or its conjugate.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double value)
      : std::domain_error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

/// The dual point lies outside S_a: some eigen-factor d_i of
/// G = (1 + mu sig)(I + lam A) - I is (numerically) zero.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, std::vector<double> offending)
      : std::runtime_error(what), offending_(std::move(offending)) {}
  const std::vector<double>& offending() const { return offending_; }

 private:
  std::vector<double> offending_;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two independent computations of the same quantity disagree. Always a bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mindist
