#include "robustbayes/implication.hpp"

#include <algorithm>

namespace robustbayes {

ImplicationReport check_testable_implication(const DiscretizedObservables& f) {
  ImplicationReport report;
  for (std::size_t i = 0; i < f.bins(); ++i) {
    report.violation_mass_d1 += std::max(f.q[i][1] - f.p[i][1], 0.0);
    report.violation_mass_d0 += std::max(f.p[i][0] - f.q[i][0], 0.0);
  }
  report.violation_mass_d1 *= f.bin_width;
  report.violation_mass_d0 *= f.bin_width;
  report.satisfied = report.violation_mass_d1 <= ImplicationReport::tolerance &&
                     report.violation_mass_d0 <= ImplicationReport::tolerance;
  return report;
}

}  // namespace robustbayes
