#ifndef ROBUSTBAYES_ORACLES_HPP
#define ROBUSTBAYES_ORACLES_HPP

#include <vector>

#include "robustbayes/late.hpp"
#include "robustbayes/observables.hpp"

// Brute-force reference implementations. They live in the shipped library so
// acceptance suites (and any language binding) can audit the fast paths, but
// nothing here is tuned for size or speed beyond desk scale.
namespace robustbayes::oracles {

// maximize c'x subject to: a_eq x = b_eq, 0 <= x <= upper.
// Dense two-phase tableau simplex with Bland's rule; intended for <= 64
// variables. Throws InfeasibleError when no feasible point exists.
struct LpProblem {
  std::vector<double> c;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<double> upper;
};

struct LpSolution {
  std::vector<double> x;
  double value = 0.0;
};

LpSolution solve_lp(const LpProblem& problem);

// LP counterpart of allocate(): exact optimum of the linear objective
// sum_k y_k h_k under the sandwich and total-mass constraints.
std::vector<double> lp_allocate(const DiscretizedObservables& f, Arm arm, Direction direction,
                                double mass);

// Full latent-type density assembly implied by a complier-density pair.
struct StructureWitness {
  std::vector<double> complier_z1;      // h1
  std::vector<double> complier_z0;      // h0
  std::vector<double> defier_z1;        // q(.,1) - p(.,1) + h1
  std::vector<double> defier_z0;        // p(.,0) - q(.,0) + h0
  std::vector<double> always_taker;     // p(.,1) - h1
  std::vector<double> never_taker;      // q(.,0) - h0
  double defier_probability = 0.0;

  // Densities recombined back into the observable layout; equal to the input
  // distribution by construction.
  std::vector<std::array<double, 2>> reassembled_p;
  std::vector<std::array<double, 2>> reassembled_q;
};

// Throws InfeasibleError naming the first bin whose sandwich bound fails.
StructureWitness witness_from_allocation(const DiscretizedObservables& f,
                                         const std::vector<double>& h1,
                                         const std::vector<double>& h0);

// Deviation needed to rationalize population mean theta in the
// intersection-bounds layout; feasibility at budget m is needed <= m.
double intersection_deviation_needed(double max_mean_lower, double min_mean_upper, double theta);

// Minimal chi-squared divergence over a discrete base measure: probabilities
// base_weights on atoms whose moment vectors are the columns of `moments`
// (pattern-level), subject to matching `target` exactly. Solved by
// enumerating active sets of the KKT system; exact up to linear-solve
// round-off. Returns the divergence; throws InfeasibleError when the moment
// polytope is empty.
double chi2_min_divergence(const std::vector<double>& base_weights,
                           const std::vector<std::vector<double>>& moments,
                           const std::vector<double>& target);

}  // namespace robustbayes::oracles

#endif
