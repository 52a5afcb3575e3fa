#ifndef ROBUSTBAYES_STATS_HPP
#define ROBUSTBAYES_STATS_HPP

#include <span>
#include <vector>

namespace robustbayes {

double normal_pdf(double x, double mean, double sd);
double normal_cdf(double x);

// Inverse standard normal CDF (Acklam's rational approximation, polished with
// one Halley step). Accurate to ~1e-15 on (0,1).
double normal_quantile(double p);

double mean(std::span<const double> xs);

// Lower empirical quantile (type 1): the ceil(p*n)-th order statistic.
double empirical_quantile(std::span<const double> xs, double p);

}  // namespace robustbayes

#endif
