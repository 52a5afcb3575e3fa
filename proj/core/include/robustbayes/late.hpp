#ifndef ROBUSTBAYES_LATE_HPP
#define ROBUSTBAYES_LATE_HPP

#include <vector>

#include "robustbayes/defiers.hpp"
#include "robustbayes/observables.hpp"

namespace robustbayes {

enum class Arm { treated, untreated };

// Direction of the overall treatment-effect bound the allocation serves. For
// the treated arm "max" piles residual complier density onto high outcomes;
// for the untreated arm "max" piles it onto low outcomes (the untreated mean
// enters the effect with a minus sign).
enum class Direction { max, min };

// Complier density for one arm at a fixed total mass: the mandatory floor
// plus residual mass filled greedily from one end of the grid, with a
// fractional fill in the threshold bin so the mass constraint is exact.
struct AllocationResult {
  std::vector<double> h;    // density per outcome unit
  double threshold = 0.0;   // outcome value of the fill frontier
  double mean_component = 0.0;  // integral of y * h(y)
  double mass = 0.0;            // integral of h(y); equals the request
};

AllocationResult allocate(const DiscretizedObservables& f, Arm arm, Direction direction,
                          double mass);

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
};

// Sharp effect bounds at defier probability exactly m: optimizes the
// complier-mean difference over the segment of feasible arm masses (a, b)
// pinned by the affine defier-mass constraint, with the per-arm allocations
// solved in closed form. The univariate profile is maximized/minimized by a
// 64-point pre-scan refined with golden-section search.
BoundPair conditional_bounds(const DiscretizedObservables& f, double m);

// Same solve, also reporting where on the segment each bound was attained
// and the segment itself (used by optimality audits).
struct ConditionalBoundsDetail {
  BoundPair bounds;
  double a_at_upper = 0.0;
  double b_at_upper = 0.0;
  double a_at_lower = 0.0;
  double b_at_lower = 0.0;
  double a_segment_lo = 0.0;
  double a_segment_hi = 0.0;
};

ConditionalBoundsDetail conditional_bounds_detailed(const DiscretizedObservables& f, double m);

}  // namespace robustbayes

#endif
