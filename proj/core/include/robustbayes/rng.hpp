#ifndef ROBUSTBAYES_RNG_HPP
#define ROBUSTBAYES_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace robustbayes {

// Seeded random source with explicitly coded samplers. All distributions are
// derived from the raw mt19937_64 stream, so a given seed reproduces the same
// draw sequence regardless of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0,1); never returns exactly 0 or 1.
  double uniform();
  double uniform(double lo, double hi);

  double normal();  // inverse-CDF sampler
  double normal(double mean, double sd);

  // Gamma(shape, rate); mean = shape/rate. Marsaglia-Tsang squeeze.
  double gamma(double shape, double rate);
  double beta(double a, double b);
  double ev1();  // standard Type-I extreme value (Gumbel)

  std::vector<double> dirichlet(std::span<const double> alphas);

  // Index sampled proportionally to nonnegative weights.
  std::size_t categorical(std::span<const double> weights);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 step; used to derive independent per-draw substream seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

}  // namespace robustbayes

#endif
