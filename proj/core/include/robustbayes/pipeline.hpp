#ifndef ROBUSTBAYES_PIPELINE_HPP
#define ROBUSTBAYES_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "robustbayes/deviation_prior.hpp"
#include "robustbayes/dpmm.hpp"
#include "robustbayes/late.hpp"

namespace robustbayes {

// Bound solver plugged into the integration loop. The production model wraps
// the treatment-effect solver; tests substitute synthetic models.
class BoundModel {
 public:
  virtual ~BoundModel() = default;
  virtual DefierSupport support(const DiscretizedObservables& f) const = 0;
  virtual BoundPair bounds(const DiscretizedObservables& f, double m) const = 0;
};

class LateBoundModel final : public BoundModel {
 public:
  DefierSupport support(const DiscretizedObservables& f) const override {
    return defier_support(f);
  }
  BoundPair bounds(const DiscretizedObservables& f, double m) const override {
    return conditional_bounds(f, m);
  }
};

struct TraceEntry {
  int draw_index = 0;
  double m = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct PipelineDiagnostics {
  int requested = 0;
  int used = 0;
  int skipped = 0;
  std::vector<std::string> skip_reasons;
  int trimmed = 0;  // trace values clamped at +-M before averaging
  std::vector<std::string> warnings;
};

struct RobustResult {
  double theta_lower_star = 0.0;
  double theta_upper_star = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double alpha = 0.05;
  std::vector<TraceEntry> traces;
  PipelineDiagnostics diagnostics;
};

struct RunOptions {
  double alpha = 0.05;
  std::uint64_t seed = 0;
  double trim_multiplier = 10.0;  // M = multiplier * outcome grid half-range
  double max_skip_fraction = 0.1;
  int give_up_grid_points = 512;
  // Per-draw work is independent; any thread count yields identical results
  // because draw substreams are seeded by index and the reduction is ordered.
  int threads = 1;
};

// Posterior means of the per-draw bounds (clamped at +-trim_bound) and the
// quantile credible interval: alpha/2 lower quantile of the lower trace,
// 1-alpha/2 lower-type quantile of the upper trace.
RobustResult aggregate_traces(std::vector<TraceEntry> traces, double alpha, double trim_bound,
                              PipelineDiagnostics diagnostics);

// Full integration loop: discretize each posterior draw, sample a deviation
// from the prior on that draw's support, solve the bounds, aggregate.
// Per-draw solver failures become recorded skips; more than
// max_skip_fraction of skips aborts. A give-up-family prior is routed to
// run_prior_set.
RobustResult run(const std::vector<PosteriorDrawF>& draws, const DeviationPrior& prior,
                 const BoundModel& model, const GridSpec& grid, const RunOptions& opts);

// The set of every deviation distribution on the support.
struct GiveUpAssumptionSet {};

// Convex pencil between two families; evaluated at its endpoint families.
struct MixtureFamily {
  DeviationPrior first;
  DeviationPrior second;
  double weight_on_first = 0.5;
};

using PriorSet = std::variant<std::vector<DeviationPrior>, GiveUpAssumptionSet, MixtureFamily>;

RobustResult run_prior_set(const std::vector<PosteriorDrawF>& draws, const PriorSet& prior_set,
                           const BoundModel& model, const GridSpec& grid, const RunOptions& opts);

// (E[Y|Z=1] - E[Y|Z=0]) / (E[D|Z=1] - E[D|Z=0]) on the grid.
double wald_ratio(const DiscretizedObservables& f);

}  // namespace robustbayes

#endif
