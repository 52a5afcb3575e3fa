#ifndef ROBUSTBAYES_INTERSECTION_HPP
#define ROBUSTBAYES_INTERSECTION_HPP

#include <vector>

#include "robustbayes/late.hpp"

namespace robustbayes::intersection {

// Conditional means of the bound variables over a finite instrument grid.
struct IntersectionData {
  std::vector<double> z_grid;
  std::vector<double> mean_upper;  // E[upper bound variable | Z = z]
  std::vector<double> mean_lower;  // E[lower bound variable | Z = z]

  void validate() const;
  double max_mean_lower() const;
  double min_mean_upper() const;
};

// (max_z mean_lower - min_z mean_upper)_+ : zero exactly when the intervals
// still intersect.
double min_deviation(const IntersectionData& data);

// [max_z mean_lower - m, min_z mean_upper + m]; width is affine in m.
// Throws InfeasibleError for m below min_deviation.
BoundPair bounds(const IntersectionData& data, double m);

}  // namespace robustbayes::intersection

#endif
