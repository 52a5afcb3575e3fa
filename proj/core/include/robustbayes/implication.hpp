#ifndef ROBUSTBAYES_IMPLICATION_HPP
#define ROBUSTBAYES_IMPLICATION_HPP

#include "robustbayes/observables.hpp"

namespace robustbayes {

// Outcome of the density-dominance check p(.,1) >= q(.,1) and q(.,0) >= p(.,0).
// The violation masses are the integrated positive parts of the gaps; both at
// or below tolerance means the no-defier instrument model survives the data.
struct ImplicationReport {
  bool satisfied = true;
  double violation_mass_d1 = 0.0;  // integral of max{q(y,1) - p(y,1), 0}
  double violation_mass_d0 = 0.0;  // integral of max{p(y,0) - q(y,0), 0}

  static constexpr double tolerance = 1e-10;
};

ImplicationReport check_testable_implication(const DiscretizedObservables& f);

}  // namespace robustbayes

#endif
