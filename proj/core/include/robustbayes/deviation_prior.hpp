#ifndef ROBUSTBAYES_DEVIATION_PRIOR_HPP
#define ROBUSTBAYES_DEVIATION_PRIOR_HPP

#include <string>

#include "robustbayes/defiers.hpp"
#include "robustbayes/rng.hpp"

namespace robustbayes {

// Marginal belief over the deviation magnitude, instantiated per data
// distribution on the support [m_min, m_max]:
//   PointMassAtMin   degenerate at m_min
//   Uniform          flat on the support
//   GaussianDecay    half-normal centred at m_min, sd = (m_max - m_min)/1.96,
//                    truncated to the support
//   GiveUpAssumption the SET of all distributions on the support; not a single
//                    density, so sample()/pdf() are unavailable for it
enum class PriorFamily { PointMassAtMin, Uniform, GaussianDecay, GiveUpAssumption };

struct DeviationPrior {
  PriorFamily family = PriorFamily::PointMassAtMin;
};

std::string to_string(PriorFamily family);

// A proper prior pinned to a concrete support interval.
class SupportPrior {
 public:
  SupportPrior(const DeviationPrior& prior, const DefierSupport& support);

  double sample(Rng& rng) const;
  // Density at m; zero off-support. The point-mass family has no density and
  // throws.
  double pdf(double m) const;

  double m_min() const { return m_min_; }
  double m_max() const { return m_max_; }

 private:
  PriorFamily family_;
  double m_min_;
  double m_max_;
  double sigma_ = 0.0;       // GaussianDecay scale
  double cdf_span_ = 0.0;    // Phi(1.96) - Phi(0), mass kept by the truncation
};

}  // namespace robustbayes

#endif
