#ifndef ROBUSTBAYES_MIV_HPP
#define ROBUSTBAYES_MIV_HPP

#include <span>
#include <vector>

#include "robustbayes/late.hpp"

namespace robustbayes::miv {

// Envelope functions of the treated (or untreated) conditional mean over a
// uniform instrument grid, and the target instrument index.
struct MIVData {
  std::vector<double> z_grid;
  std::vector<double> h_upper;
  std::vector<double> h_lower;
  int z0_index = 0;

  void validate() const;
  double spacing() const;
};

// Deviation metric direction: the left metric integrates the gap to the
// running maximum from the left; the right metric is its mirror (running
// minimum from the right), evaluated through the reflect-and-negate map.
enum class Metric { left, right };

// Running maximum from the left; nondecreasing, pointwise >= h, idempotent.
std::vector<double> left_envelope(std::span<const double> h);

// Integrated gap between a grid function and its left envelope.
double deviation_left(std::span<const double> h, double spacing);

// Smallest deviation any conditional mean sandwiched between the envelopes
// can have.
double min_deviation(const MIVData& data, Metric metric = Metric::left);

// Largest deviation attainable by a sandwiched conditional mean (needed to
// know when an exact deviation budget stops being attainable).
double max_deviation(const MIVData& data, Metric metric = Metric::left);

// Bounds on the conditional mean at z0 when the deviation budget is
// min_deviation + delta_m. Under the left metric the lower bound is the
// lower envelope at z0; the upper bound solves a monotone bisection in the
// raised-tail level t. Throws InfeasibleError when the budget exceeds
// max_deviation.
BoundPair theta_bounds(const MIVData& data, double delta_m, Metric metric = Metric::left);

// Envelope interval over both metric directions.
BoundPair theta_bounds_union(const MIVData& data, double delta_m);

}  // namespace robustbayes::miv

#endif
