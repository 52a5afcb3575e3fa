#include "robustbayes/defiers.hpp"

#include <algorithm>
#include <string>

#include "robustbayes/errors.hpp"

namespace robustbayes {

namespace {
constexpr double kRangeTol = 1e-9;

void check_range(double v, const ArmMassRange& r, const char* name) {
  if (v < r.lo - kRangeTol || v > r.hi + kRangeTol)
    throw InfeasibleError(std::string("defier_mass: ") + name + "=" + std::to_string(v) +
                          " outside [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
}
}  // namespace

ArmMassRange treated_mass_range(const DiscretizedObservables& f) {
  double floor_mass = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.bins(); ++i) {
    floor_mass += std::max(f.p[i][1] - f.q[i][1], 0.0);
    total += f.p[i][1];
  }
  return {floor_mass * f.bin_width, total * f.bin_width};
}

ArmMassRange untreated_mass_range(const DiscretizedObservables& f) {
  double floor_mass = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.bins(); ++i) {
    floor_mass += std::max(f.q[i][0] - f.p[i][0], 0.0);
    total += f.q[i][0];
  }
  return {floor_mass * f.bin_width, total * f.bin_width};
}

double defier_mass(const DiscretizedObservables& f, double a, double b) {
  check_range(a, treated_mass_range(f), "a");
  check_range(b, untreated_mass_range(f), "b");
  const double z1 = f.pr_z1, z0 = 1.0 - f.pr_z1;
  return z1 * (f.q_total(1) - f.p_total(1) + a) + z0 * (f.p_total(0) - f.q_total(0) + b);
}

double defier_mass_swapped_weights(const DiscretizedObservables& f, double a, double b) {
  check_range(a, treated_mass_range(f), "a");
  check_range(b, untreated_mass_range(f), "b");
  const double z1 = f.pr_z1, z0 = 1.0 - f.pr_z1;
  return z0 * (f.q_total(1) - f.p_total(1) + a) + z1 * (f.p_total(0) - f.q_total(0) + b);
}

DefierSupport defier_support(const DiscretizedObservables& f) {
  const ArmMassRange ra = treated_mass_range(f);
  const ArmMassRange rb = untreated_mass_range(f);
  DefierSupport s;
  s.m_min = std::max(0.0, defier_mass(f, ra.lo, rb.lo));
  s.m_max = std::max(s.m_min, defier_mass(f, ra.hi, rb.hi));
  return s;
}

}  // namespace robustbayes
