#include "robustbayes/dpmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robustbayes/errors.hpp"
#include "robustbayes/stats.hpp"

namespace robustbayes {

void DPMMConfig::validate() const {
  if (!(gamma_shape > 1.0)) throw std::invalid_argument("DPMMConfig: gamma_shape must exceed 1");
  if (!(gamma_rate > 0.0)) throw std::invalid_argument("DPMMConfig: gamma_rate must be positive");
  if (!(base_sd > 0.0)) throw std::invalid_argument("DPMMConfig: base_sd must be positive");
  if (!(concentration > 0.0)) throw std::invalid_argument("DPMMConfig: concentration must be positive");
  if (truncation_level < 10) throw std::invalid_argument("DPMMConfig: truncation_level must be >= 10");
  if (burn_in < 0 || thinning < 0) throw std::invalid_argument("DPMMConfig: negative chain lengths");
  double total = 0.0;
  for (double c : dz_pseudocounts) {
    if (c < 0.0) throw std::invalid_argument("DPMMConfig: negative pseudocount");
    total += c;
  }
  if (!(total > 0.0)) throw std::invalid_argument("DPMMConfig: pseudocounts must have positive total");
}

DpmmSampler::DpmmSampler(std::vector<Observation> data, const DPMMConfig& config,
                         std::uint64_t seed)
    : config_(config), seed_(seed), rng_(seed) {
  config_.validate();

  for (const auto& rec : data) {
    if (!std::isfinite(rec.y)) throw std::invalid_argument("DpmmSampler: non-finite outcome");
    if ((rec.d != 0 && rec.d != 1) || (rec.z != 0 && rec.z != 1))
      throw std::invalid_argument("DpmmSampler: d and z must be binary");
    cells_[cell_index(rec.d, rec.z)].y.push_back(rec.y);
  }

  const int t = config_.truncation_level;
  for (int c = 0; c < 4; ++c) {
    auto& cell = cells_[c];
    counts_[c] = static_cast<double>(cell.y.size());
    cell.empty = cell.y.empty();
    if (cell.empty)
      warnings_.push_back("cell d=" + std::to_string(c % 2) + " z=" + std::to_string(c / 2) +
                          " has no observations; density falls back to the prior predictive");
    cell.alloc.assign(cell.y.size(), 0);
    cell.theta.assign(t, config_.base_mean);
    cell.sticks.assign(t, 0.0);
    cell.weights.assign(t, 0.0);
    // Start the chain at the prior centre: mean-zero precision draw avoided so
    // the state is deterministic before the first sweep.
    cell.sd = std::sqrt(config_.gamma_rate / (config_.gamma_shape - 1.0));
    double remaining = 1.0;
    for (int h = 0; h < t; ++h) {
      const double v = (h + 1 == t) ? 1.0 : 1.0 / (1.0 + config_.concentration);
      cell.sticks[h] = v;
      cell.weights[h] = v * remaining;
      remaining *= 1.0 - v;
    }
  }
}

DpmmSampler fit(const std::vector<Observation>& data, const DPMMConfig& config,
                std::uint64_t seed) {
  return DpmmSampler(data, config, seed);
}

void DpmmSampler::sweep() {
  for (auto& cell : cells_) sweep_cell(cell);
}

void DpmmSampler::sweep_cell(CellChain& cell) {
  const int t = config_.truncation_level;
  const int n = static_cast<int>(cell.y.size());

  std::vector<int> comp_count(t, 0);
  if (n > 0) {
    // Allocation update in log space.
    std::vector<double> log_w(t);
    for (int h = 0; h < t; ++h)
      log_w[h] = cell.weights[h] > 0.0 ? std::log(cell.weights[h]) : -1e300;
    std::vector<double> prob(t);
    for (int i = 0; i < n; ++i) {
      double best = -1e300;
      for (int h = 0; h < t; ++h) {
        const double z = (cell.y[i] - cell.theta[h]) / cell.sd;
        prob[h] = log_w[h] - 0.5 * z * z;
        best = std::max(best, prob[h]);
      }
      for (int h = 0; h < t; ++h) prob[h] = std::exp(prob[h] - best);
      cell.alloc[i] = static_cast<int>(rng_.categorical(prob));
      ++comp_count[cell.alloc[i]];
    }
  }

  // Stick weights.
  int tail = n;
  double remaining = 1.0;
  for (int h = 0; h < t; ++h) {
    tail -= comp_count[h];
    const double v = (h + 1 == t)
                         ? 1.0
                         : rng_.beta(1.0 + comp_count[h], config_.concentration + tail);
    cell.sticks[h] = v;
    cell.weights[h] = v * remaining;
    remaining *= 1.0 - v;
  }

  // Component locations: conjugate normal update, prior draw when empty.
  const double prec0 = 1.0 / (config_.base_sd * config_.base_sd);
  const double prec_y = 1.0 / (cell.sd * cell.sd);
  std::vector<double> sums(t, 0.0);
  for (int i = 0; i < n; ++i) sums[cell.alloc[i]] += cell.y[i];
  for (int h = 0; h < t; ++h) {
    if (comp_count[h] > 0) {
      const double prec = prec0 + comp_count[h] * prec_y;
      const double mean = (config_.base_mean * prec0 + sums[h] * prec_y) / prec;
      cell.theta[h] = rng_.normal(mean, std::sqrt(1.0 / prec));
    } else {
      cell.theta[h] = rng_.normal(config_.base_mean, config_.base_sd);
    }
  }

  // Common cell precision, updated once per sweep.
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = cell.y[i] - cell.theta[cell.alloc[i]];
    sse += r * r;
  }
  const double precision = rng_.gamma(config_.gamma_shape + 0.5 * n,
                                      config_.gamma_rate + 0.5 * sse);
  cell.sd = 1.0 / std::sqrt(precision);
}

PosteriorDrawF DpmmSampler::emit() {
  PosteriorDrawF draw;
  std::array<double, 4> alphas;
  for (int c = 0; c < 4; ++c) alphas[c] = config_.dz_pseudocounts[c] + counts_[c];
  const auto probs = rng_.dirichlet(alphas);
  std::copy(probs.begin(), probs.end(), draw.dz_probs.begin());
  for (int c = 0; c < 4; ++c) {
    draw.cells[c].weights = cells_[c].weights;
    draw.cells[c].means = cells_[c].theta;
    draw.cells[c].sd = cells_[c].sd;
  }
  draw.draw_index = emitted_++;
  draw.seed = seed_;
  return draw;
}

std::vector<PosteriorDrawF> DpmmSampler::draw(int count) {
  if (count < 1) throw std::invalid_argument("DpmmSampler::draw: count must be >= 1");
  std::vector<PosteriorDrawF> out;
  out.reserve(static_cast<std::size_t>(count));
  if (!burned_in_) {
    for (int i = 0; i < config_.burn_in; ++i) sweep();
    burned_in_ = true;
  }
  for (int k = 0; k < count; ++k) {
    for (int i = 0; i < std::max(1, config_.thinning); ++i) sweep();
    out.push_back(emit());
  }
  return out;
}

DiscretizedObservables discretize(const PosteriorDrawF& draw, const GridSpec& grid) {
  grid.validate();
  const int k = grid.k;
  const double bw = grid.width();

  std::array<std::vector<double>, 4> dens;
  for (int c = 0; c < 4; ++c) {
    const CellMixture& mix = draw.cells[c];
    if (mix.weights.size() != mix.means.size())
      throw std::invalid_argument("discretize: malformed mixture");
    dens[c].assign(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
      const double y = grid.midpoint(i);
      double v = 0.0;
      for (std::size_t h = 0; h < mix.weights.size(); ++h) {
        if (mix.weights[h] <= 0.0) continue;
        v += mix.weights[h] * normal_pdf(y, mix.means[h], mix.sd);
      }
      dens[c][static_cast<std::size_t>(i)] = v;
    }
    double mass = 0.0;
    for (double v : dens[c]) mass += v;
    mass *= bw;
    const double truncated = 1.0 - mass;
    if (truncated > 1e-3)
      throw NumericalError("discretize: grid truncates " + std::to_string(truncated) +
                           " of the mass in cell " + std::to_string(c));
  }

  const double pz1 = draw.dz_probs[cell_index(0, 1)] + draw.dz_probs[cell_index(1, 1)];
  const double pz0 = 1.0 - pz1;
  if (pz1 < 1e-12 || pz0 < 1e-12)
    throw NumericalError("discretize: instrument cell probabilities degenerate");

  DiscretizedObservables f;
  f.y_grid = grid.midpoints();
  f.bin_width = bw;
  f.pr_z1 = pz1;
  f.p.assign(static_cast<std::size_t>(k), {0.0, 0.0});
  f.q.assign(static_cast<std::size_t>(k), {0.0, 0.0});

  double p_mass = 0.0, q_mass = 0.0;
  for (int i = 0; i < k; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    for (int d = 0; d < 2; ++d) {
      f.p[idx][d] = dens[cell_index(d, 1)][idx] * (draw.dz_probs[cell_index(d, 1)] / pz1);
      f.q[idx][d] = dens[cell_index(d, 0)][idx] * (draw.dz_probs[cell_index(d, 0)] / pz0);
      p_mass += f.p[idx][d];
      q_mass += f.q[idx][d];
    }
  }
  p_mass *= bw;
  q_mass *= bw;
  for (int i = 0; i < k; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    for (int d = 0; d < 2; ++d) {
      f.p[idx][d] /= p_mass;
      f.q[idx][d] /= q_mass;
    }
  }
  f.validate();
  return f;
}

}  // namespace robustbayes
