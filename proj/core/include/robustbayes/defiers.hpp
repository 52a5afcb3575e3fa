#ifndef ROBUSTBAYES_DEFIERS_HPP
#define ROBUSTBAYES_DEFIERS_HPP

#include "robustbayes/observables.hpp"

namespace robustbayes {

// Support of the defier probability compatible with a data distribution.
struct DefierSupport {
  double m_min = 0.0;
  double m_max = 0.0;
};

// Range of complier mass admissible in one instrument arm: the mandatory floor
// (integrated positive part of the density gap) up to the full arm mass.
struct ArmMassRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Treated-arm complier mass range: [integral (p(.,1)-q(.,1))_+, integral p(.,1)].
ArmMassRange treated_mass_range(const DiscretizedObservables& f);
// Untreated-arm range: [integral (q(.,0)-p(.,0))_+, integral q(.,0)].
ArmMassRange untreated_mass_range(const DiscretizedObservables& f);

// Defier probability implied by complier masses a (treated arm, Z=1 side) and
// b (untreated arm, Z=0 side):
//
//   m = Pr(Z=1) * [Q1 - P1 + a] + Pr(Z=0) * [P0 - Q0 + b]
//
// with P1 = Pr(D=1|Z=1), Q1 = Pr(D=1|Z=0), P0 = Pr(D=0|Z=1), Q0 = Pr(D=0|Z=0).
// Affine and strictly increasing in each argument whenever both instrument
// arms carry mass. Throws InfeasibleError when a or b leaves its range.
double defier_mass(const DiscretizedObservables& f, double a, double b);

// Variant with the instrument weights exchanged (a weighted by Pr(Z=0), b by
// Pr(Z=1)). Not used by the solvers; kept behind the CLI debug flag so the two
// weightings can be compared side by side on real data.
double defier_mass_swapped_weights(const DiscretizedObservables& f, double a, double b);

// [m_min, m_max]: defier_mass evaluated at the floor masses and at the full
// arm masses. m_min == 0 exactly when the testable implication is satisfied.
DefierSupport defier_support(const DiscretizedObservables& f);

}  // namespace robustbayes

#endif
