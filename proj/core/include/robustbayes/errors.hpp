#ifndef ROBUSTBAYES_ERRORS_HPP
#define ROBUSTBAYES_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace robustbayes {

// Requested point lies outside the model's feasible region (mass out of its
// sandwich bounds, deviation outside the support interval, empty search box).
class InfeasibleError : public std::domain_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::domain_error(what) {}
};

// A numeric procedure failed: vanishing denominator, optimizer that did not
// converge, grid that truncates too much posterior mass.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace robustbayes

#endif
