#ifndef ROBUSTBAYES_TESTS_HELPERS_HPP
#define ROBUSTBAYES_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "robustbayes/dpmm.hpp"
#include "robustbayes/observables.hpp"
#include "robustbayes/rng.hpp"

namespace testhelpers {

inline robustbayes::DiscretizedObservables make_observables(
    double y_lo, double bin_width, std::vector<std::array<double, 2>> p,
    std::vector<std::array<double, 2>> q, double pr_z1) {
  robustbayes::DiscretizedObservables f;
  const std::size_t k = p.size();
  f.bin_width = bin_width;
  f.y_grid.resize(k);
  for (std::size_t i = 0; i < k; ++i) f.y_grid[i] = y_lo + (i + 0.5) * bin_width;
  f.p = std::move(p);
  f.q = std::move(q);
  f.pr_z1 = pr_z1;
  f.validate();
  return f;
}

// Arbitrary valid distribution: p and q are independently normalized.
inline robustbayes::DiscretizedObservables random_observables(robustbayes::Rng& rng, int k,
                                                              double y_lo = 0.0,
                                                              double bin_width = 1.0) {
  std::vector<std::array<double, 2>> p(k), q(k);
  double sp = 0.0, sq = 0.0;
  for (auto& row : p) {
    row = {rng.uniform(), rng.uniform()};
    sp += row[0] + row[1];
  }
  for (auto& row : q) {
    row = {rng.uniform(), rng.uniform()};
    sq += row[0] + row[1];
  }
  for (auto& row : p) {
    row[0] /= sp * bin_width;
    row[1] /= sp * bin_width;
  }
  for (auto& row : q) {
    row[0] /= sq * bin_width;
    row[1] /= sq * bin_width;
  }
  return make_observables(y_lo, bin_width, std::move(p), std::move(q),
                          rng.uniform(0.2, 0.8));
}

// Valid distribution satisfying the density-dominance implication:
// q(.,1) <= p(.,1) and q(.,0) >= p(.,0) pointwise.
inline robustbayes::DiscretizedObservables random_nonrefuted(robustbayes::Rng& rng, int k,
                                                             double y_lo = 0.0,
                                                             double bin_width = 1.0) {
  std::vector<std::array<double, 2>> p(k), q(k);
  double sp = 0.0;
  for (auto& row : p) {
    row = {rng.uniform(), 0.2 + rng.uniform()};  // keep a real treated arm
    sp += row[0] + row[1];
  }
  for (auto& row : p) {
    row[0] /= sp * bin_width;
    row[1] /= sp * bin_width;
  }
  double deficit = 0.0;
  for (int i = 0; i < k; ++i) {
    q[i][1] = p[i][1] * rng.uniform(0.1, 0.9);
    deficit += p[i][1] - q[i][1];
  }
  std::vector<double> extra(k);
  double se = 0.0;
  for (auto& e : extra) {
    e = rng.uniform();
    se += e;
  }
  for (int i = 0; i < k; ++i) q[i][0] = p[i][0] + extra[i] / se * deficit;
  return make_observables(y_lo, bin_width, std::move(p), std::move(q),
                          rng.uniform(0.2, 0.8));
}

// A one-point posterior: narrow kernels centred on the bin midpoints so the
// draw discretizes back to (approximately) the given distribution.
inline robustbayes::PosteriorDrawF draw_concentrated_at(
    const robustbayes::DiscretizedObservables& f) {
  using robustbayes::cell_index;
  robustbayes::PosteriorDrawF draw;
  const double pz1 = f.pr_z1, pz0 = 1.0 - f.pr_z1;
  draw.dz_probs[cell_index(0, 1)] = pz1 * f.p_total(0);
  draw.dz_probs[cell_index(1, 1)] = pz1 * f.p_total(1);
  draw.dz_probs[cell_index(0, 0)] = pz0 * f.q_total(0);
  draw.dz_probs[cell_index(1, 0)] = pz0 * f.q_total(1);

  const double sd = f.bin_width / 12.0;
  for (int d = 0; d < 2; ++d) {
    for (int z = 0; z < 2; ++z) {
      auto& cell = draw.cells[cell_index(d, z)];
      cell.sd = sd;
      double total = 0.0;
      for (std::size_t i = 0; i < f.bins(); ++i) {
        const double mass = (z == 1 ? f.p[i][d] : f.q[i][d]) * f.bin_width;
        if (mass <= 0.0) continue;
        cell.means.push_back(f.y_grid[i]);
        cell.weights.push_back(mass);
        total += mass;
      }
      if (cell.weights.empty()) {  // mass-zero cell still needs a proper mixture
        cell.means.push_back(f.y_grid.front());
        cell.weights.push_back(1.0);
        total = 1.0;
      }
      for (auto& w : cell.weights) w /= total;
    }
  }
  return draw;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

}  // namespace testhelpers

#endif
