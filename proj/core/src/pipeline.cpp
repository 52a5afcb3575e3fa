#include "robustbayes/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

#include "robustbayes/errors.hpp"
#include "robustbayes/stats.hpp"

namespace robustbayes {

namespace {

struct DrawOutcome {
  std::optional<TraceEntry> trace;
  std::string skip_reason;
};

// Evaluation mode: sample one deviation from a proper prior, or extremize the
// bounds over the deviation support (the give-up prior set's extreme points).
enum class DeviationRule { sample, extremize };

DrawOutcome evaluate_draw(const PosteriorDrawF& draw, int index, const DeviationPrior& prior,
                          DeviationRule rule, const BoundModel& model, const GridSpec& grid,
                          const RunOptions& opts) {
  DrawOutcome out;
  try {
    const DiscretizedObservables f = discretize(draw, grid);
    const DefierSupport support = model.support(f);

    if (rule == DeviationRule::sample) {
      Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(index)));
      const SupportPrior instantiated(prior, support);
      const double m = instantiated.sample(rng);
      const BoundPair b = model.bounds(f, m);
      out.trace = TraceEntry{index, m, b.lower, b.upper};
      return out;
    }

    // Extreme-point sweep over an m-grid: interior points plus both endpoints.
    const int g = std::max(1, opts.give_up_grid_points);
    const double span = support.m_max - support.m_min;
    double best_upper = -std::numeric_limits<double>::infinity();
    double best_lower = std::numeric_limits<double>::infinity();
    double m_at_upper = support.m_min;
    int feasible = 0;
    std::string last_error;
    for (int j = -1; j <= g; ++j) {
      const double m = j < 0          ? support.m_min
                       : (j == g)     ? support.m_max
                                      : support.m_min + span * (j + 1) / (g + 1);
      try {
        const BoundPair b = model.bounds(f, m);
        ++feasible;
        if (b.upper > best_upper) {
          best_upper = b.upper;
          m_at_upper = m;
        }
        best_lower = std::min(best_lower, b.lower);
      } catch (const std::exception& e) {
        last_error = e.what();
      }
    }
    if (feasible == 0) throw NumericalError("no feasible deviation point: " + last_error);
    out.trace = TraceEntry{index, m_at_upper, best_lower, best_upper};
    return out;
  } catch (const std::exception& e) {
    out.skip_reason = e.what();
    return out;
  }
}

std::vector<DrawOutcome> map_draws(const std::vector<PosteriorDrawF>& draws,
                                   const DeviationPrior& prior, DeviationRule rule,
                                   const BoundModel& model, const GridSpec& grid,
                                   const RunOptions& opts) {
  std::vector<DrawOutcome> outcomes(draws.size());
  const int n_threads = std::max(1, opts.threads);
  if (n_threads == 1 || draws.size() < 2) {
    for (std::size_t i = 0; i < draws.size(); ++i)
      outcomes[i] = evaluate_draw(draws[i], static_cast<int>(i), prior, rule, model, grid, opts);
    return outcomes;
  }
  std::vector<std::thread> workers;
  std::atomic<std::size_t> next{0};
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= draws.size()) return;
        outcomes[i] = evaluate_draw(draws[i], static_cast<int>(i), prior, rule, model, grid, opts);
      }
    });
  }
  for (auto& w : workers) w.join();
  return outcomes;
}

RobustResult run_with_rule(const std::vector<PosteriorDrawF>& draws, const DeviationPrior& prior,
                           DeviationRule rule, const BoundModel& model, const GridSpec& grid,
                           const RunOptions& opts) {
  if (draws.empty()) throw std::invalid_argument("run: no posterior draws");
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw std::invalid_argument("run: alpha outside (0,1)");

  const auto outcomes = map_draws(draws, prior, rule, model, grid, opts);

  PipelineDiagnostics diag;
  diag.requested = static_cast<int>(draws.size());
  std::vector<TraceEntry> traces;
  traces.reserve(draws.size());
  for (const auto& oc : outcomes) {
    if (oc.trace) {
      traces.push_back(*oc.trace);
    } else {
      ++diag.skipped;
      diag.skip_reasons.push_back(oc.skip_reason);
    }
  }
  diag.used = static_cast<int>(traces.size());
  if (diag.skipped > opts.max_skip_fraction * diag.requested)
    throw NumericalError("run: " + std::to_string(diag.skipped) + " of " +
                         std::to_string(diag.requested) + " draws skipped (" +
                         (diag.skip_reasons.empty() ? "" : diag.skip_reasons.front()) + ")");

  const double trim_bound = opts.trim_multiplier * 0.5 * (grid.y_max - grid.y_min);
  return aggregate_traces(std::move(traces), opts.alpha, trim_bound, std::move(diag));
}

RobustResult union_combine(std::vector<RobustResult> results) {
  RobustResult out = results.front();
  for (std::size_t i = 1; i < results.size(); ++i) {
    const auto& r = results[i];
    out.theta_lower_star = std::min(out.theta_lower_star, r.theta_lower_star);
    out.theta_upper_star = std::max(out.theta_upper_star, r.theta_upper_star);
    out.ci_lower = std::min(out.ci_lower, r.ci_lower);
    out.ci_upper = std::max(out.ci_upper, r.ci_upper);
    out.traces.insert(out.traces.end(), r.traces.begin(), r.traces.end());
    out.diagnostics.requested += r.diagnostics.requested;
    out.diagnostics.used += r.diagnostics.used;
    out.diagnostics.skipped += r.diagnostics.skipped;
    out.diagnostics.trimmed += r.diagnostics.trimmed;
    out.diagnostics.skip_reasons.insert(out.diagnostics.skip_reasons.end(),
                                        r.diagnostics.skip_reasons.begin(),
                                        r.diagnostics.skip_reasons.end());
    out.diagnostics.warnings.insert(out.diagnostics.warnings.end(), r.diagnostics.warnings.begin(),
                                    r.diagnostics.warnings.end());
  }
  return out;
}

}  // namespace

RobustResult aggregate_traces(std::vector<TraceEntry> traces, double alpha, double trim_bound,
                              PipelineDiagnostics diagnostics) {
  if (traces.empty()) throw std::invalid_argument("aggregate_traces: empty trace set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("aggregate_traces: bad alpha");

  std::sort(traces.begin(), traces.end(),
            [](const TraceEntry& a, const TraceEntry& b) { return a.draw_index < b.draw_index; });

  std::vector<double> lowers, uppers, lowers_clamped, uppers_clamped;
  lowers.reserve(traces.size());
  uppers.reserve(traces.size());
  for (const auto& t : traces) {
    lowers.push_back(t.lower);
    uppers.push_back(t.upper);
    const double lc = std::clamp(t.lower, -trim_bound, trim_bound);
    const double uc = std::clamp(t.upper, -trim_bound, trim_bound);
    if (lc != t.lower) ++diagnostics.trimmed;
    if (uc != t.upper) ++diagnostics.trimmed;
    lowers_clamped.push_back(lc);
    uppers_clamped.push_back(uc);
  }

  RobustResult result;
  result.alpha = alpha;
  result.theta_lower_star = mean(lowers_clamped);
  result.theta_upper_star = mean(uppers_clamped);
  result.ci_lower = empirical_quantile(lowers, alpha / 2.0);
  result.ci_upper = empirical_quantile(uppers, 1.0 - alpha / 2.0);

  if (result.ci_lower > result.theta_lower_star + 1e-9 ||
      result.theta_upper_star > result.ci_upper + 1e-9)
    diagnostics.warnings.push_back("credible interval does not enclose the posterior-mean bounds");

  result.traces = std::move(traces);
  result.diagnostics = std::move(diagnostics);
  return result;
}

RobustResult run(const std::vector<PosteriorDrawF>& draws, const DeviationPrior& prior,
                 const BoundModel& model, const GridSpec& grid, const RunOptions& opts) {
  if (prior.family == PriorFamily::GiveUpAssumption)
    return run_prior_set(draws, GiveUpAssumptionSet{}, model, grid, opts);
  return run_with_rule(draws, prior, DeviationRule::sample, model, grid, opts);
}

RobustResult run_prior_set(const std::vector<PosteriorDrawF>& draws, const PriorSet& prior_set,
                           const BoundModel& model, const GridSpec& grid, const RunOptions& opts) {
  if (std::holds_alternative<GiveUpAssumptionSet>(prior_set)) {
    return run_with_rule(draws, DeviationPrior{PriorFamily::GiveUpAssumption},
                         DeviationRule::extremize, model, grid, opts);
  }

  if (const auto* list = std::get_if<std::vector<DeviationPrior>>(&prior_set)) {
    if (list->empty()) throw std::invalid_argument("run_prior_set: empty prior list");
    std::vector<RobustResult> results;
    for (std::size_t i = 0; i < list->size(); ++i) {
      RunOptions per = opts;
      per.seed = list->size() == 1 ? opts.seed : mix_seed(opts.seed, 0x100 + i);
      results.push_back(run(draws, (*list)[i], model, grid, per));
    }
    return union_combine(std::move(results));
  }

  const auto& mixture = std::get<MixtureFamily>(prior_set);
  const double w = mixture.weight_on_first;
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("run_prior_set: mixture weight outside [0,1]");
  if (w == 1.0) return run(draws, mixture.first, model, grid, opts);
  if (w == 0.0) return run(draws, mixture.second, model, grid, opts);

  RunOptions opt_a = opts, opt_b = opts;
  opt_a.seed = mix_seed(opts.seed, 0xA);
  opt_b.seed = mix_seed(opts.seed, 0xB);
  RobustResult ra = run(draws, mixture.first, model, grid, opt_a);
  RobustResult rb = run(draws, mixture.second, model, grid, opt_b);

  // Posterior-mean bounds combine affinely across the pencil; the credible
  // interval is reported as the envelope of the endpoint intervals, which may
  // be conservative.
  RobustResult out = union_combine({ra, rb});
  out.theta_lower_star = w * ra.theta_lower_star + (1.0 - w) * rb.theta_lower_star;
  out.theta_upper_star = w * ra.theta_upper_star + (1.0 - w) * rb.theta_upper_star;
  out.diagnostics.warnings.push_back("mixture-family credible interval is the endpoint envelope");
  return out;
}

double wald_ratio(const DiscretizedObservables& f) {
  const double numerator = f.mean_y_given_z1() - f.mean_y_given_z0();
  const double denominator = f.p_total(1) - f.q_total(1);
  if (std::abs(denominator) < 1e-12)
    throw NumericalError("wald_ratio: first stage is zero");
  return numerator / denominator;
}

}  // namespace robustbayes
