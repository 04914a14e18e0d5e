#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace saddle {

/// Malformed arguments: dimension mismatches, bad parameters, failed preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation requires a convex domain but was handed a finite point set.
class UnsupportedDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The objective produced a non-finite value. Carries the offending point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::vector<double> x,
                  std::vector<double> y)
      : std::runtime_error(what), x_(std::move(x)), y_(std::move(y)) {}

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

}  // namespace saddle
