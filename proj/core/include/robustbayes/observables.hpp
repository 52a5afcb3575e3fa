#ifndef ROBUSTBAYES_OBSERVABLES_HPP
#define ROBUSTBAYES_OBSERVABLES_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace robustbayes {

// Uniform outcome grid: k bins of equal width covering [y_min, y_max],
// densities evaluated at bin midpoints.
struct GridSpec {
  double y_min = 0.0;
  double y_max = 1.0;
  int k = 200;

  double width() const { return (y_max - y_min) / k; }
  double midpoint(int i) const { return y_min + (i + 0.5) * width(); }
  std::vector<double> midpoints() const;
  void validate() const;
};

// Grid representation of an observed-data distribution: joint outcome/treatment
// densities conditional on each instrument arm, plus the instrument share.
//
//   p[k][d] = density of (Y = y_k, D = d) given Z = 1, per outcome unit
//   q[k][d] = same given Z = 0
//
// Densities are piecewise constant on bins, so every integral used downstream
// is a finite sum: sum_k sum_d p[k][d] * bin_width == 1 (and likewise q).
struct DiscretizedObservables {
  std::vector<double> y_grid;  // bin midpoints, strictly increasing, uniform
  double bin_width = 0.0;
  std::vector<std::array<double, 2>> p;
  std::vector<std::array<double, 2>> q;
  double pr_z1 = 0.5;

  std::size_t bins() const { return y_grid.size(); }

  // Throws std::invalid_argument when an invariant fails.
  void validate() const;

  // Marginal mass of arm d in each instrument cell: integral of the density.
  double p_total(int d) const;  // Pr(D = d | Z = 1)
  double q_total(int d) const;  // Pr(D = d | Z = 0)

  double mean_y_given_z1() const;  // E[Y | Z = 1]
  double mean_y_given_z0() const;  // E[Y | Z = 0]
};

}  // namespace robustbayes

#endif
