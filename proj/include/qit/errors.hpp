#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qit {

// Bad shapes, bad axes, mismatched lengths, q outside a documented range.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of ln_q / exp_q.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// exp_q argument with 1 + (1-q)x <= 0. Carries the boundary value of x.
class ExpQDomainError : public DomainError {
 public:
  ExpQDomainError(const std::string& what, double boundary)
      : DomainError(what), boundary_(boundary) {}
  double boundary() const noexcept { return boundary_; }

 private:
  double boundary_;
};

// Iterative solver gave up. Carries the last iterate and its residuals.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   std::vector<double> residuals = {})
      : std::runtime_error(what),
        last_iterate_(std::move(last_iterate)),
        residuals_(std::move(residuals)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> last_iterate_;
  std::vector<double> residuals_;
};

// Exact enumeration would exceed the table budget.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A trajectory used a transition of probability zero.
class ImpossibleTrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qit
