#include "robustbayes/miv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "robustbayes/errors.hpp"

namespace robustbayes::miv {

namespace {

constexpr double kSpacingTol = 1e-12;

// Pointwise ceiling of the raised-tail candidate: below the target index the
// minimal-deviation mean, from the target on the level t, clipped into the
// upper envelope so the function stays attainable. Its deviation is the least
// deviation any sandwiched conditional mean reaching t at z0 must pay.
std::vector<double> raised_candidate(const std::vector<double>& h_tilde,
                                     const std::vector<double>& h_upper, int z0, double t) {
  std::vector<double> h(h_tilde);
  for (std::size_t i = static_cast<std::size_t>(z0); i < h.size(); ++i)
    h[i] = std::min(std::max(t, h_tilde[i]), h_upper[i]);
  return h;
}

std::vector<double> h_tilde_of(const MIVData& data) {
  std::vector<double> env = left_envelope(data.h_lower);
  for (std::size_t i = 0; i < env.size(); ++i) env[i] = std::min(env[i], data.h_upper[i]);
  return env;
}

// Reflect the grid and negate values; the right metric of the original data
// is the left metric of the image.
MIVData reflected(const MIVData& data) {
  const std::size_t k = data.z_grid.size();
  MIVData out;
  out.z_grid = data.z_grid;  // spacing is all that matters
  out.h_upper.resize(k);
  out.h_lower.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.h_upper[i] = -data.h_lower[k - 1 - i];
    out.h_lower[i] = -data.h_upper[k - 1 - i];
  }
  out.z0_index = static_cast<int>(k) - 1 - data.z0_index;
  return out;
}

}  // namespace

void MIVData::validate() const {
  const std::size_t k = z_grid.size();
  if (k < 2) throw std::invalid_argument("MIVData: need at least 2 grid points");
  if (h_upper.size() != k || h_lower.size() != k)
    throw std::invalid_argument("MIVData: envelope lengths do not match the grid");
  if (z0_index < 0 || static_cast<std::size_t>(z0_index) >= k)
    throw std::invalid_argument("MIVData: z0 index out of range");
  const double sp = z_grid[1] - z_grid[0];
  if (!(sp > 0.0)) throw std::invalid_argument("MIVData: grid not increasing");
  for (std::size_t i = 1; i < k; ++i)
    if (std::abs(z_grid[i] - z_grid[i - 1] - sp) > kSpacingTol * std::max(1.0, std::abs(sp)))
      throw std::invalid_argument("MIVData: grid spacing not uniform");
  for (std::size_t i = 0; i < k; ++i)
    if (h_lower[i] > h_upper[i])
      throw std::invalid_argument("MIVData: envelopes cross at grid point " + std::to_string(i));
}

double MIVData::spacing() const { return z_grid[1] - z_grid[0]; }

std::vector<double> left_envelope(std::span<const double> h) {
  std::vector<double> out(h.begin(), h.end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

double deviation_left(std::span<const double> h, double spacing) {
  double running = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (double v : h) {
    running = std::max(running, v);
    total += running - v;
  }
  return total * spacing;
}

double min_deviation(const MIVData& data, Metric metric) {
  data.validate();
  if (metric == Metric::right) return min_deviation(reflected(data), Metric::left);
  return deviation_left(h_tilde_of(data), data.spacing());
}

double max_deviation(const MIVData& data, Metric metric) {
  data.validate();
  if (metric == Metric::right) return max_deviation(reflected(data), Metric::left);

  // At each grid point the deviation-maximizing mean sits on one of the two
  // envelopes; sweep left to right keeping the Pareto frontier of
  // (running max, accumulated gap) states.
  struct State {
    double level;
    double value;
  };
  std::vector<State> frontier{{-std::numeric_limits<double>::infinity(), 0.0}};
  for (std::size_t i = 0; i < data.z_grid.size(); ++i) {
    std::vector<State> next;
    next.reserve(frontier.size() * 2);
    for (const State& s : frontier) {
      for (const double g : {data.h_lower[i], data.h_upper[i]}) {
        const double level = std::max(s.level, g);
        next.push_back({level, s.value + (level - g)});
      }
    }
    std::sort(next.begin(), next.end(), [](const State& a, const State& b) {
      return a.level != b.level ? a.level > b.level : a.value > b.value;
    });
    frontier.clear();
    double best = -std::numeric_limits<double>::infinity();
    for (const State& s : next) {
      if (s.value > best) {
        frontier.push_back(s);
        best = s.value;
      }
    }
  }
  double best = 0.0;
  for (const State& s : frontier) best = std::max(best, s.value);
  return best * data.spacing();
}

BoundPair theta_bounds(const MIVData& data, double delta_m, Metric metric) {
  data.validate();
  if (!(delta_m > 0.0)) throw InfeasibleError("miv::theta_bounds: delta_m must be positive");
  if (metric == Metric::right) {
    const BoundPair mirrored = theta_bounds(reflected(data), delta_m, Metric::left);
    return {-mirrored.upper, -mirrored.lower};
  }

  const double budget = min_deviation(data) + delta_m;
  const double ceiling = max_deviation(data);
  if (budget > ceiling + 1e-12)
    throw InfeasibleError("miv::theta_bounds: budget " + std::to_string(budget) +
                          " exceeds the maximal attainable deviation " + std::to_string(ceiling));

  const auto z0 = static_cast<std::size_t>(data.z0_index);
  const std::vector<double> h_tilde = h_tilde_of(data);
  const double sp = data.spacing();
  const auto dev_at = [&](double t) {
    return deviation_left(raised_candidate(h_tilde, data.h_upper, data.z0_index, t), sp);
  };

  BoundPair out;
  out.lower = data.h_lower[z0];

  double t_lo = data.h_lower[z0];
  double t_hi = data.h_upper[z0];
  if (dev_at(t_hi) <= budget) {
    out.upper = t_hi;  // sandwich cap
    return out;
  }
  // dev_at is nondecreasing and continuous in t; solve dev_at(t) = budget.
  for (int it = 0; it < 200 && t_hi - t_lo > 1e-13 * std::max(1.0, std::abs(t_hi)); ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (dev_at(mid) <= budget)
      t_lo = mid;
    else
      t_hi = mid;
  }
  out.upper = t_lo;
  return out;
}

BoundPair theta_bounds_union(const MIVData& data, double delta_m) {
  const BoundPair left = theta_bounds(data, delta_m, Metric::left);
  const BoundPair right = theta_bounds(data, delta_m, Metric::right);
  return {std::min(left.lower, right.lower), std::max(left.upper, right.upper)};
}

}  // namespace robustbayes::miv
