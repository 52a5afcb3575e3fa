#include "robustbayes/late.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "robustbayes/errors.hpp"

namespace robustbayes {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kRatioGuard = 1e-12;  // arm masses below this make the ratio undefined

struct ArmDensities {
  std::vector<double> floor;  // mandatory complier density
  std::vector<double> free;   // room above the floor: min of the two arm densities
};

ArmDensities arm_densities(const DiscretizedObservables& f, Arm arm) {
  const std::size_t k = f.bins();
  ArmDensities out;
  out.floor.resize(k);
  out.free.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (arm == Arm::treated) {
      out.floor[i] = std::max(f.p[i][1] - f.q[i][1], 0.0);
      out.free[i] = std::min(f.p[i][1], f.q[i][1]);
    } else {
      out.floor[i] = std::max(f.q[i][0] - f.p[i][0], 0.0);
      out.free[i] = std::min(f.q[i][0], f.p[i][0]);
    }
  }
  return out;
}

bool fills_from_top(Arm arm, Direction direction) {
  const bool want_high_mean = (direction == Direction::max);
  return arm == Arm::treated ? want_high_mean : !want_high_mean;
}

}  // namespace

AllocationResult allocate(const DiscretizedObservables& f, Arm arm, Direction direction,
                          double mass) {
  const ArmMassRange range = arm == Arm::treated ? treated_mass_range(f) : untreated_mass_range(f);
  if (mass < range.lo - kMassTol || mass > range.hi + kMassTol)
    throw InfeasibleError("allocate: mass " + std::to_string(mass) + " outside [" +
                          std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
  mass = std::clamp(mass, range.lo, range.hi);

  const ArmDensities dens = arm_densities(f, arm);
  const std::size_t k = f.bins();
  const double bw = f.bin_width;

  AllocationResult result;
  result.h = dens.floor;
  result.mass = range.lo;

  double residual = mass - range.lo;
  const bool from_top = fills_from_top(arm, direction);
  // Frontier starts at the outer grid edge and moves inward as bins fill.
  result.threshold = from_top ? f.y_grid.back() + 0.5 * bw : f.y_grid.front() - 0.5 * bw;

  for (std::size_t step = 0; step < k && residual > 0.0; ++step) {
    const std::size_t i = from_top ? k - 1 - step : step;
    const double capacity = dens.free[i] * bw;
    if (capacity <= 0.0) continue;
    const double take = std::min(capacity, residual);
    result.h[i] += take / bw;
    residual -= take;
    result.threshold = f.y_grid[i];
    if (take < capacity) break;  // fractional fill ends the walk
  }
  result.mass = mass;

  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += f.y_grid[i] * result.h[i];
  result.mean_component = mean * bw;
  return result;
}

namespace {

// Profile of the effect at one point of the (a, b) segment.
double effect_at(const DiscretizedObservables& f, Direction direction, double a, double b) {
  const auto treated = allocate(f, Arm::treated, direction, a);
  const auto untreated = allocate(f, Arm::untreated, direction, b);
  return treated.mean_component / a - untreated.mean_component / b;
}

struct Segment {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double w1 = 0.0;  // Pr(Z=1)
  double w0 = 0.0;  // Pr(Z=0)
  double rhs = 0.0;

  double b_of(double a) const { return (rhs - w1 * a) / w0; }
};

Segment feasible_segment(const DiscretizedObservables& f, double m) {
  const DefierSupport support = defier_support(f);
  if (m < support.m_min - kMassTol || m > support.m_max + kMassTol)
    throw InfeasibleError("conditional_bounds: m=" + std::to_string(m) + " outside [" +
                          std::to_string(support.m_min) + ", " + std::to_string(support.m_max) + "]");
  m = std::clamp(m, support.m_min, support.m_max);

  Segment seg;
  seg.w1 = f.pr_z1;
  seg.w0 = 1.0 - f.pr_z1;
  if (seg.w1 < kRatioGuard || seg.w0 < kRatioGuard)
    throw NumericalError("conditional_bounds: both instrument arms must carry mass");

  const ArmMassRange ra = treated_mass_range(f);
  const ArmMassRange rb = untreated_mass_range(f);
  const double offset = seg.w1 * (f.q_total(1) - f.p_total(1)) + seg.w0 * (f.p_total(0) - f.q_total(0));
  seg.rhs = m - offset;

  // a-range from both box constraints, then the ratio guards on a and b(a).
  double lo = std::max(ra.lo, (seg.rhs - seg.w0 * rb.hi) / seg.w1);
  double hi = std::min(ra.hi, (seg.rhs - seg.w0 * rb.lo) / seg.w1);
  lo = std::max(lo, kRatioGuard);
  hi = std::min(hi, (seg.rhs - seg.w0 * kRatioGuard) / seg.w1);
  if (lo > hi + kMassTol)
    throw InfeasibleError("conditional_bounds: feasible complier-mass segment is empty at m=" +
                          std::to_string(m));
  seg.a_lo = lo;
  seg.a_hi = std::max(lo, hi);
  return seg;
}

struct SegmentOptimum {
  double arg = 0.0;
  double value = 0.0;
};

// Pre-scan plus golden-section refinement of a continuous univariate profile.
SegmentOptimum optimize_segment(const Segment& seg, const std::function<double(double)>& value,
                                bool maximize) {
  const double sign = maximize ? 1.0 : -1.0;
  if (seg.a_hi - seg.a_lo < 1e-14) return {seg.a_lo, value(seg.a_lo)};

  constexpr int kScan = 64;
  double best_x = seg.a_lo;
  double best_v = sign * value(seg.a_lo);
  int best_i = 0;
  for (int i = 1; i <= kScan; ++i) {
    const double x = seg.a_lo + (seg.a_hi - seg.a_lo) * i / kScan;
    const double v = sign * value(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
      best_i = i;
    }
  }

  double lo = seg.a_lo + (seg.a_hi - seg.a_lo) * std::max(0, best_i - 1) / kScan;
  double hi = seg.a_lo + (seg.a_hi - seg.a_lo) * std::min(kScan, best_i + 1) / kScan;
  const double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = sign * value(x1);
  double f2 = sign * value(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = sign * value(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = sign * value(x2);
    }
  }
  const double x_mid = 0.5 * (lo + hi);
  const double v_mid = sign * value(x_mid);
  if (v_mid > best_v) {
    best_v = v_mid;
    best_x = x_mid;
  }
  return {best_x, sign * best_v};
}

}  // namespace

ConditionalBoundsDetail conditional_bounds_detailed(const DiscretizedObservables& f, double m) {
  const Segment seg = feasible_segment(f, m);

  const auto upper_profile = [&](double a) {
    return effect_at(f, Direction::max, a, seg.b_of(a));
  };
  const auto lower_profile = [&](double a) {
    return effect_at(f, Direction::min, a, seg.b_of(a));
  };

  const SegmentOptimum up = optimize_segment(seg, upper_profile, /*maximize=*/true);
  const SegmentOptimum low = optimize_segment(seg, lower_profile, /*maximize=*/false);

  ConditionalBoundsDetail detail;
  detail.bounds = {low.value, up.value};
  detail.a_at_upper = up.arg;
  detail.b_at_upper = seg.b_of(up.arg);
  detail.a_at_lower = low.arg;
  detail.b_at_lower = seg.b_of(low.arg);
  detail.a_segment_lo = seg.a_lo;
  detail.a_segment_hi = seg.a_hi;
  if (detail.bounds.lower > detail.bounds.upper) {
    // Numerical ties from the two independent searches.
    if (detail.bounds.lower - detail.bounds.upper > 1e-9)
      throw NumericalError("conditional_bounds: crossed bounds");
    std::swap(detail.bounds.lower, detail.bounds.upper);
  }
  return detail;
}

BoundPair conditional_bounds(const DiscretizedObservables& f, double m) {
  return conditional_bounds_detailed(f, m).bounds;
}

}  // namespace robustbayes
