#include "robustbayes/intersection.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "robustbayes/errors.hpp"

namespace robustbayes::intersection {

void IntersectionData::validate() const {
  if (z_grid.empty()) throw std::invalid_argument("IntersectionData: empty instrument grid");
  if (mean_upper.size() != z_grid.size() || mean_lower.size() != z_grid.size())
    throw std::invalid_argument("IntersectionData: mean vectors do not match the grid");
  for (std::size_t i = 0; i < z_grid.size(); ++i)
    if (mean_lower[i] > mean_upper[i])
      throw std::invalid_argument("IntersectionData: bound variables unordered at grid point " +
                                  std::to_string(i));
}

double IntersectionData::max_mean_lower() const {
  return *std::max_element(mean_lower.begin(), mean_lower.end());
}

double IntersectionData::min_mean_upper() const {
  return *std::min_element(mean_upper.begin(), mean_upper.end());
}

double min_deviation(const IntersectionData& data) {
  data.validate();
  return std::max(data.max_mean_lower() - data.min_mean_upper(), 0.0);
}

BoundPair bounds(const IntersectionData& data, double m) {
  const double needed = min_deviation(data);
  if (m < needed - 1e-12)
    throw InfeasibleError("intersection::bounds: m=" + std::to_string(m) +
                          " below the minimal deviation " + std::to_string(needed));
  return {data.max_mean_lower() - m, data.min_mean_upper() + m};
}

}  // namespace robustbayes::intersection
