#ifndef ROBUSTBAYES_CHOICE_HPP
#define ROBUSTBAYES_CHOICE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "robustbayes/late.hpp"

namespace robustbayes::choice {

// Availability design: under z = 1 all J inside goods plus the outside option
// are available; under z = 0 good J is removed. Choice probabilities stack the
// z = 1 block (goods 1..J) then the z = 0 block (goods 1..J-1); the outside
// option absorbs the remainder of each block.
struct ChoiceModelSpec {
  int num_goods = 2;          // J
  std::vector<double> probs;  // length 2J-1
  int mc_samples = 100000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Closed-form choice probabilities under iid extreme-value shocks; index 0 is
// the outside option, then the available inside goods in order.
std::vector<double> logit_probs(std::span<const double> u, int z);

// Shock support used for the dual expectations. Monte Carlo atoms share the
// seed across calls (common random numbers, antithetic pairs); the product
// grid is an explicit equal-weight quadrature used when a finite support is
// wanted exactly.
struct ShockAtoms {
  std::vector<std::vector<double>> xi;  // each row length J+1; index 0 = outside shock
  std::vector<double> weights;          // sum to 1
  bool discrete_support = false;

  static ShockAtoms monte_carlo(int num_goods, int samples, std::uint64_t seed);
  static ShockAtoms product_grid(int num_goods, int points_per_dim);
};

// Smallest and largest chi-squared divergence from the extreme-value baseline
// consistent with the moment conditions at mean utility u.
//
// delta_lower solves the unconstrained concave dual
//   sup_{zeta,lambda} -E[phi*(-zeta - lambda'g)] - zeta - lambda'P,
// phi*(x) = x^2/2 + x, by quasi-Newton ascent. delta_upper is the exact
// maximal divergence over the given atom support (vertex enumeration of the
// pattern polytope); under Monte Carlo atoms it grows with the sample size,
// reflecting that the continuum value is unbounded, and upper_attained is
// reported false.
struct DivergenceInterval {
  double delta_lower = 0.0;
  double delta_upper = 0.0;
  bool lower_attained = false;
  bool upper_attained = false;
};

DivergenceInterval divergence_interval(std::span<const double> u, const ChoiceModelSpec& spec);
DivergenceInterval divergence_interval_on_atoms(std::span<const double> u,
                                                std::span<const double> probs,
                                                const ShockAtoms& atoms);

// Lower dual solved on its own, exposing the maximizing multipliers
// (zeta first, then lambda) so curvature and stationarity can be audited.
struct DualSolution {
  double value = 0.0;
  std::vector<double> multipliers;
  double grad_norm = 0.0;
  bool converged = false;
};

DualSolution solve_lower_dual(std::span<const double> u, std::span<const double> probs,
                              const ShockAtoms& atoms);
double lower_dual_objective(std::span<const double> u, std::span<const double> probs,
                            const ShockAtoms& atoms, std::span<const double> multipliers);

struct SearchBox {
  std::vector<double> lo;  // length J
  std::vector<double> hi;

  void validate(int num_goods) const;
};

// Bounds on the mean utility of good J over the box, keeping the utilities
// whose divergence interval contains m. Feasibility of a u_J value is probed
// by minimizing delta_lower over the remaining coordinates (multi-start local
// search); the feasible edge is then sharpened by bisection.
BoundPair utility_bounds(double m, const ChoiceModelSpec& spec, const SearchBox& box);
BoundPair utility_bounds_on_atoms(double m, std::span<const double> probs,
                                  const ShockAtoms& atoms, const SearchBox& box);

}  // namespace robustbayes::choice

#endif
