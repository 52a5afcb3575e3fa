#include "robustbayes/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace robustbayes {

namespace {
constexpr double kMassTol = 1e-10;
constexpr double kSpacingTol = 1e-12;
}  // namespace

std::vector<double> GridSpec::midpoints() const {
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = midpoint(i);
  return out;
}

void GridSpec::validate() const {
  if (k < 2) throw std::invalid_argument("GridSpec: need at least 2 bins");
  if (!(y_max > y_min)) throw std::invalid_argument("GridSpec: y_max must exceed y_min");
  if (!std::isfinite(y_min) || !std::isfinite(y_max))
    throw std::invalid_argument("GridSpec: non-finite bounds");
}

void DiscretizedObservables::validate() const {
  const std::size_t k = y_grid.size();
  if (k < 2) throw std::invalid_argument("DiscretizedObservables: need at least 2 bins");
  if (p.size() != k || q.size() != k)
    throw std::invalid_argument("DiscretizedObservables: density rows do not match grid size");
  if (!(bin_width > 0.0)) throw std::invalid_argument("DiscretizedObservables: bin_width must be positive");
  if (!(pr_z1 >= 0.0 && pr_z1 <= 1.0))
    throw std::invalid_argument("DiscretizedObservables: pr_z1 outside [0,1]");

  for (std::size_t i = 1; i < k; ++i) {
    const double gap = y_grid[i] - y_grid[i - 1];
    if (!(gap > 0.0)) throw std::invalid_argument("DiscretizedObservables: y_grid not strictly increasing");
    if (std::abs(gap - bin_width) > kSpacingTol * std::max(1.0, std::abs(bin_width)))
      throw std::invalid_argument("DiscretizedObservables: y_grid spacing not uniform");
  }

  double p_mass = 0.0, q_mass = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (int d = 0; d < 2; ++d) {
      if (p[i][d] < 0.0 || q[i][d] < 0.0)
        throw std::invalid_argument("DiscretizedObservables: negative density at bin " + std::to_string(i));
      p_mass += p[i][d];
      q_mass += q[i][d];
    }
  }
  p_mass *= bin_width;
  q_mass *= bin_width;
  if (std::abs(p_mass - 1.0) > kMassTol)
    throw std::invalid_argument("DiscretizedObservables: p does not integrate to 1 (got " +
                                std::to_string(p_mass) + ")");
  if (std::abs(q_mass - 1.0) > kMassTol)
    throw std::invalid_argument("DiscretizedObservables: q does not integrate to 1 (got " +
                                std::to_string(q_mass) + ")");
}

double DiscretizedObservables::p_total(int d) const {
  double s = 0.0;
  for (const auto& row : p) s += row[d];
  return s * bin_width;
}

double DiscretizedObservables::q_total(int d) const {
  double s = 0.0;
  for (const auto& row : q) s += row[d];
  return s * bin_width;
}

double DiscretizedObservables::mean_y_given_z1() const {
  double s = 0.0;
  for (std::size_t i = 0; i < y_grid.size(); ++i) s += y_grid[i] * (p[i][0] + p[i][1]);
  return s * bin_width;
}

double DiscretizedObservables::mean_y_given_z0() const {
  double s = 0.0;
  for (std::size_t i = 0; i < y_grid.size(); ++i) s += y_grid[i] * (q[i][0] + q[i][1]);
  return s * bin_width;
}

}  // namespace robustbayes
