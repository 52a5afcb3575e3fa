#ifndef ROBUSTBAYES_DPMM_HPP
#define ROBUSTBAYES_DPMM_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "robustbayes/observables.hpp"
#include "robustbayes/rng.hpp"

namespace robustbayes {

struct Observation {
  double y = 0.0;
  int d = 0;
  int z = 0;
};

inline int cell_index(int d, int z) { return 2 * z + d; }

// Dirichlet-process mixture-of-normals configuration, one chain per (d, z)
// cell plus a conjugate Dirichlet update for the cell probabilities.
struct DPMMConfig {
  double base_mean = 0.0;  // normal centring measure of component locations
  double base_sd = 1.0;
  double gamma_shape = 2.0;  // prior on the cell precision; shape must exceed 1
  double gamma_rate = 4.0;
  double concentration = 1.0;  // total mass of the location base measure
  int truncation_level = 50;   // stick-breaking truncation
  int burn_in = 500;
  int thinning = 5;
  std::array<double, 4> dz_pseudocounts = {0.25, 0.25, 0.25, 0.25};  // index 2z+d

  void validate() const;
};

struct CellMixture {
  std::vector<double> weights;  // sum to 1
  std::vector<double> means;
  double sd = 1.0;  // common within-cell kernel sd
};

// One posterior realization of the observed-data distribution.
struct PosteriorDrawF {
  std::array<double, 4> dz_probs{};   // index 2z+d, sums to 1
  std::array<CellMixture, 4> cells{};
  int draw_index = 0;
  std::uint64_t seed = 0;
};

// Blocked Gibbs sampler (truncated stick-breaking). Chains are deterministic
// given (data, config, seed); a single chain is strictly sequential.
class DpmmSampler {
 public:
  DpmmSampler(std::vector<Observation> data, const DPMMConfig& config, std::uint64_t seed);

  // Emits `count` draws, running burn-in before the first emission and
  // `thinning` sweeps between emissions.
  std::vector<PosteriorDrawF> draw(int count);

  const std::vector<std::string>& warnings() const { return warnings_; }
  const DPMMConfig& config() const { return config_; }

 private:
  struct CellChain {
    std::vector<double> y;
    std::vector<int> alloc;
    std::vector<double> theta;
    std::vector<double> sticks;
    std::vector<double> weights;
    double sd = 1.0;
    bool empty = false;
  };

  void sweep();
  void sweep_cell(CellChain& cell);
  PosteriorDrawF emit();

  DPMMConfig config_;
  std::uint64_t seed_;
  Rng rng_;
  std::array<CellChain, 4> cells_;
  std::array<double, 4> counts_{};
  bool burned_in_ = false;
  int emitted_ = 0;
  std::vector<std::string> warnings_;
};

DpmmSampler fit(const std::vector<Observation>& data, const DPMMConfig& config,
                std::uint64_t seed);

// Evaluates a draw's mixtures on the grid and assembles the conditional
// observable densities, renormalized so the grid invariants hold exactly.
// Throws NumericalError when any cell mixture truncates more than 1e-3 of its
// mass off the grid.
DiscretizedObservables discretize(const PosteriorDrawF& draw, const GridSpec& grid);

}  // namespace robustbayes

#endif
