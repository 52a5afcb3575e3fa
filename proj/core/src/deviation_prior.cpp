#include "robustbayes/deviation_prior.hpp"

#include <cmath>
#include <stdexcept>

#include "robustbayes/errors.hpp"
#include "robustbayes/stats.hpp"

namespace robustbayes {

std::string to_string(PriorFamily family) {
  switch (family) {
    case PriorFamily::PointMassAtMin: return "pointmass";
    case PriorFamily::Uniform: return "uniform";
    case PriorFamily::GaussianDecay: return "gauss";
    case PriorFamily::GiveUpAssumption: return "giveup";
  }
  return "unknown";
}

SupportPrior::SupportPrior(const DeviationPrior& prior, const DefierSupport& support)
    : family_(prior.family), m_min_(support.m_min), m_max_(support.m_max) {
  if (!(m_min_ <= m_max_)) throw std::invalid_argument("SupportPrior: inverted support");
  if (family_ == PriorFamily::GiveUpAssumption)
    throw std::invalid_argument("SupportPrior: the give-up family is a prior set, not a density");
  const double span = m_max_ - m_min_;
  if (family_ == PriorFamily::GaussianDecay && span > 0.0) {
    sigma_ = span / 1.96;
    cdf_span_ = normal_cdf(1.96) - 0.5;
  }
}

double SupportPrior::sample(Rng& rng) const {
  const double span = m_max_ - m_min_;
  switch (family_) {
    case PriorFamily::PointMassAtMin:
      return m_min_;
    case PriorFamily::Uniform:
      return span <= 0.0 ? m_min_ : rng.uniform(m_min_, m_max_);
    case PriorFamily::GaussianDecay: {
      if (span <= 0.0) return m_min_;
      // Inverse CDF of the truncated half-normal: z in [0, 1.96].
      const double u = rng.uniform();
      const double z = normal_quantile(0.5 + u * cdf_span_);
      return m_min_ + sigma_ * std::min(z, 1.96);
    }
    default:
      throw NumericalError("SupportPrior: unsupported family");
  }
}

double SupportPrior::pdf(double m) const {
  const double span = m_max_ - m_min_;
  if (family_ == PriorFamily::PointMassAtMin)
    throw std::domain_error("SupportPrior: point mass has no density");
  if (m < m_min_ || m > m_max_) return 0.0;
  switch (family_) {
    case PriorFamily::Uniform:
      if (span <= 0.0) throw std::domain_error("SupportPrior: degenerate support has no density");
      return 1.0 / span;
    case PriorFamily::GaussianDecay: {
      if (span <= 0.0) throw std::domain_error("SupportPrior: degenerate support has no density");
      const double z = (m - m_min_) / sigma_;
      return normal_pdf(z, 0.0, 1.0) / (sigma_ * cdf_span_);
    }
    default:
      throw std::domain_error("SupportPrior: unsupported family");
  }
}

}  // namespace robustbayes
