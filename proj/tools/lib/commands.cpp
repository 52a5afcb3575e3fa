#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>

#include "csv.hpp"
#include "errors_cli.hpp"
#include "resultdoc.hpp"
#include "robustbayes/choice.hpp"
#include "robustbayes/errors.hpp"
#include "robustbayes/intersection.hpp"
#include "robustbayes/miv.hpp"
#include "robustbayes/pipeline.hpp"

namespace robustbayes::cli {

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

PriorFamily parse_prior(const std::string& name) {
  if (name == "pointmass") return PriorFamily::PointMassAtMin;
  if (name == "uniform") return PriorFamily::Uniform;
  if (name == "gauss") return PriorFamily::GaussianDecay;
  if (name == "giveup") return PriorFamily::GiveUpAssumption;
  throw ConfigError("bad_prior", "unknown prior family '" + name + "'");
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

void echo_common_config(Document& doc, const RunConfig& config) {
  doc.set_header("schema", "robustbayes.result.v1");
  doc.set_header("generated_at", timestamp_utc());
  doc.set("config", "subcommand", config.subcommand);
  doc.set("config", "seed", std::to_string(config.seed));
  if (!config.data_path.empty()) doc.set("config", "data", config.data_path);
}

void write_traces(const RunConfig& config, const RobustResult& result) {
  if (config.traces_prefix.empty()) return;
  const auto dump = [&](const std::string& suffix, auto field) {
    std::ofstream out(config.traces_prefix + suffix);
    if (!out) throw ConfigError("unwritable_output", "cannot write trace file " + suffix);
    for (const auto& t : result.traces) out << t.draw_index << ' ' << field(t) << '\n';
  };
  dump(".lower.txt", [](const TraceEntry& t) { return t.lower; });
  dump(".upper.txt", [](const TraceEntry& t) { return t.upper; });
  dump(".m.txt", [](const TraceEntry& t) { return t.m; });
}

void fill_result_section(Document& doc, const RobustResult& result) {
  doc.set("result", "theta_lower_star", format_double(result.theta_lower_star));
  doc.set("result", "theta_upper_star", format_double(result.theta_upper_star));
  doc.set("result", "ci_lower", format_double(result.ci_lower));
  doc.set("result", "ci_upper", format_double(result.ci_upper));
  doc.set("result", "alpha", format_double(result.alpha));
  doc.set("diagnostics", "draws_requested", std::to_string(result.diagnostics.requested));
  doc.set("diagnostics", "draws_used", std::to_string(result.diagnostics.used));
  doc.set("diagnostics", "draws_skipped", std::to_string(result.diagnostics.skipped));
  doc.set("diagnostics", "trimmed_values", std::to_string(result.diagnostics.trimmed));
  if (!result.diagnostics.skip_reasons.empty())
    doc.set("diagnostics", "first_skip_reason", result.diagnostics.skip_reasons.front());
  for (std::size_t i = 0; i < result.diagnostics.warnings.size(); ++i)
    doc.set("diagnostics", "warning_" + std::to_string(i), result.diagnostics.warnings[i]);
}

double sample_wald_ratio(const std::vector<Observation>& records) {
  double sum_y[2] = {0, 0}, sum_d[2] = {0, 0};
  double n[2] = {0, 0};
  for (const auto& r : records) {
    sum_y[r.z] += r.y;
    sum_d[r.z] += r.d;
    n[r.z] += 1.0;
  }
  if (n[0] < 1 || n[1] < 1)
    throw CsvError("missing_columns", "need observations in both instrument arms");
  const double numer = sum_y[1] / n[1] - sum_y[0] / n[0];
  const double denom = sum_d[1] / n[1] - sum_d[0] / n[0];
  if (std::abs(denom) < 1e-12) throw NumericalError("sample Wald ratio: first stage is zero");
  return numer / denom;
}

Document run_late(const RunConfig& config) {
  auto records = ingest_late_csv(config.data_path);
  if (records.empty()) throw CsvError("missing_columns", config.data_path + " has no data rows");
  const double wald_sample = sample_wald_ratio(records);

  // Standardizing the outcome keeps the mixture base measure on the data
  // scale; treatment-effect bounds scale back by the sample sd.
  double y_mean = 0.0, y_sd = 1.0;
  if (config.standardize) {
    double s = 0.0, s2 = 0.0;
    for (const auto& r : records) {
      s += r.y;
      s2 += r.y * r.y;
    }
    y_mean = s / records.size();
    y_sd = std::sqrt(std::max(s2 / records.size() - y_mean * y_mean, 1e-12));
    for (auto& r : records) r.y = (r.y - y_mean) / y_sd;
  }

  double lo = records.front().y, hi = records.front().y;
  double s = 0.0, s2 = 0.0;
  for (const auto& r : records) {
    lo = std::min(lo, r.y);
    hi = std::max(hi, r.y);
    s += r.y;
    s2 += r.y * r.y;
  }
  const double sd = std::sqrt(std::max(s2 / records.size() - (s / records.size()) * (s / records.size()), 1e-12));
  const double margin = 4.0 * std::max(sd, 1e-3);
  const GridSpec grid{lo - margin, hi + margin, config.grid_k};

  DpmmSampler sampler = fit(records, config.dpmm, config.seed);
  const auto draws = sampler.draw(config.draws);

  RunOptions opts;
  opts.alpha = config.alpha;
  opts.seed = config.seed;
  opts.threads = config.threads;
  const LateBoundModel model;
  const DeviationPrior prior{parse_prior(config.prior)};
  RobustResult result = run(draws, prior, model, grid, opts);

  for (const auto& w : sampler.warnings()) result.diagnostics.warnings.push_back(w);

  if (config.standardize) {
    result.theta_lower_star *= y_sd;
    result.theta_upper_star *= y_sd;
    result.ci_lower *= y_sd;
    result.ci_upper *= y_sd;
    for (auto& t : result.traces) {
      t.lower *= y_sd;
      t.upper *= y_sd;
    }
  }

  Document doc;
  echo_common_config(doc, config);
  doc.set("config", "draws", std::to_string(config.draws));
  doc.set("config", "alpha", format_double(config.alpha));
  doc.set("config", "prior", config.prior);
  doc.set("config", "grid_k", std::to_string(config.grid_k));
  doc.set("config", "standardize", config.standardize ? "true" : "false");
  doc.set("config", "rows", std::to_string(records.size()));
  fill_result_section(doc, result);
  doc.set("result", "wald_ratio", format_double(wald_sample));

  if (config.debug && !draws.empty()) {
    // Both defier-mass weightings on the first posterior draw, for comparison.
    const DiscretizedObservables f0 = discretize(draws.front(), grid);
    const ArmMassRange ra = treated_mass_range(f0);
    const ArmMassRange rb = untreated_mass_range(f0);
    doc.set("diagnostics", "debug_defier_mass_standard",
            format_double(defier_mass(f0, ra.lo, rb.lo)));
    doc.set("diagnostics", "debug_defier_mass_swapped",
            format_double(defier_mass_swapped_weights(f0, ra.lo, rb.lo)));
  }

  write_traces(config, result);
  return doc;
}

Document run_intersection(const RunConfig& config) {
  intersection::IntersectionData data{config.ix_z, config.ix_mean_upper, config.ix_mean_lower};
  const double needed = intersection::min_deviation(data);
  const BoundPair b = intersection::bounds(data, config.ix_m);

  Document doc;
  echo_common_config(doc, config);
  doc.set("config", "z", join_doubles(config.ix_z));
  doc.set("config", "mean_upper", join_doubles(config.ix_mean_upper));
  doc.set("config", "mean_lower", join_doubles(config.ix_mean_lower));
  doc.set("config", "m", format_double(config.ix_m));
  doc.set("result", "min_deviation", format_double(needed));
  doc.set("result", "theta_lower", format_double(b.lower));
  doc.set("result", "theta_upper", format_double(b.upper));
  return doc;
}

Document run_choice(const RunConfig& config) {
  choice::ChoiceModelSpec spec;
  spec.num_goods = config.ch_goods;
  spec.probs = config.ch_probs;
  spec.mc_samples = config.ch_mc_samples;
  spec.seed = config.seed;
  choice::SearchBox box;
  box.lo.assign(static_cast<std::size_t>(config.ch_goods), config.ch_box_lo);
  box.hi.assign(static_cast<std::size_t>(config.ch_goods), config.ch_box_hi);
  const BoundPair b = choice::utility_bounds(config.ch_m, spec, box);

  Document doc;
  echo_common_config(doc, config);
  doc.set("config", "goods", std::to_string(config.ch_goods));
  doc.set("config", "probs", join_doubles(config.ch_probs));
  doc.set("config", "m", format_double(config.ch_m));
  doc.set("config", "mc_samples", std::to_string(config.ch_mc_samples));
  doc.set("config", "box", format_double(config.ch_box_lo) + "," + format_double(config.ch_box_hi));
  doc.set("result", "u_lower", format_double(b.lower));
  doc.set("result", "u_upper", format_double(b.upper));
  return doc;
}

Document run_miv(const RunConfig& config) {
  miv::MIVData data{config.miv_z, config.miv_h_upper, config.miv_h_lower, config.miv_z0};
  BoundPair b;
  if (config.miv_metric == "left")
    b = miv::theta_bounds(data, config.miv_delta_m, miv::Metric::left);
  else if (config.miv_metric == "right")
    b = miv::theta_bounds(data, config.miv_delta_m, miv::Metric::right);
  else if (config.miv_metric == "union")
    b = miv::theta_bounds_union(data, config.miv_delta_m);
  else
    throw ConfigError("bad_metric", "unknown monotonicity metric '" + config.miv_metric + "'");

  Document doc;
  echo_common_config(doc, config);
  doc.set("config", "z", join_doubles(config.miv_z));
  doc.set("config", "h_upper", join_doubles(config.miv_h_upper));
  doc.set("config", "h_lower", join_doubles(config.miv_h_lower));
  doc.set("config", "z0", std::to_string(config.miv_z0));
  doc.set("config", "delta_m", format_double(config.miv_delta_m));
  doc.set("config", "metric", config.miv_metric);
  doc.set("result", "min_deviation_left", format_double(miv::min_deviation(data, miv::Metric::left)));
  doc.set("result", "theta_lower", format_double(b.lower));
  doc.set("result", "theta_upper", format_double(b.upper));
  return doc;
}

Document run_simulate(const RunConfig& config) {
  const auto records = simulate_records(config);
  if (config.data_path.empty())
    throw ConfigError("missing_data_path", "simulate writes the CSV to --data");
  write_late_csv(config.data_path, records);

  Document doc;
  echo_common_config(doc, config);
  doc.set("config", "n", std::to_string(config.sim_n));
  doc.set("config", "defier_share", format_double(config.sim_defier_share));
  doc.set("config", "effect", format_double(config.sim_effect));
  doc.set("result", "rows_written", std::to_string(records.size()));
  doc.set("result", "csv", config.data_path);
  return doc;
}

}  // namespace

void RunConfig::validate() const {
  if (draws < 1) throw ConfigError("bad_draws", "draws must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("bad_alpha", "alpha must be in (0,1)");
  if (grid_k < 16) throw ConfigError("bad_grid", "grid_k must be >= 16");
  if (threads < 1) throw ConfigError("bad_threads", "threads must be >= 1");
  if (subcommand == "late" && data_path.empty())
    throw ConfigError("missing_data_path", "late requires --data");
  try {
    dpmm.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad_dpmm", e.what());
  }
}

std::vector<Observation> simulate_records(const RunConfig& config) {
  const double complier =
      1.0 - config.sim_defier_share - config.sim_always_share - config.sim_never_share;
  if (complier < 0.0)
    throw ConfigError("bad_shares", "type shares exceed 1");
  if (config.sim_n < 1) throw ConfigError("bad_n", "simulate needs n >= 1");

  Rng rng(config.seed);
  std::vector<Observation> records;
  records.reserve(static_cast<std::size_t>(config.sim_n));
  const double shares[4] = {complier, config.sim_defier_share, config.sim_always_share,
                            config.sim_never_share};
  for (int i = 0; i < config.sim_n; ++i) {
    const std::size_t type = rng.categorical(shares);
    const int z = rng.uniform() < config.sim_pr_z1 ? 1 : 0;
    int d = 0;
    switch (type) {
      case 0: d = z; break;          // complier
      case 1: d = 1 - z; break;      // defier
      case 2: d = 1; break;          // always-taker
      case 3: d = 0; break;          // never-taker
    }
    // Latent outcome: type-specific level plus the treatment effect.
    const double type_shift[4] = {0.0, 0.1, 0.3, -0.3};
    const double y = rng.normal(type_shift[type] + config.sim_effect * d, 0.5);
    records.push_back({y, d, z});
  }
  return records;
}

int run_subcommand(const RunConfig& config) {
  const auto fail = [&](const std::string& code, const std::string& module,
                        const std::string& message, int exit_code) {
    Document doc;
    doc.set_header("schema", "robustbayes.error.v1");
    doc.set_header("generated_at", timestamp_utc());
    doc.set("error", "code", code);
    doc.set("error", "module", module);
    doc.set("error", "message", message);
    doc.set("error", "exit_code", std::to_string(exit_code));
    if (!config.output_path.empty()) {
      try {
        save_document(config.output_path, doc);
      } catch (const std::exception&) {
        // fall through to stderr
      }
    }
    std::cerr << "error (" << code << "): " << message << '\n';
    return exit_code;
  };

  try {
    config.validate();
    Document doc;
    if (config.subcommand == "late")
      doc = run_late(config);
    else if (config.subcommand == "intersection")
      doc = run_intersection(config);
    else if (config.subcommand == "choice")
      doc = run_choice(config);
    else if (config.subcommand == "miv")
      doc = run_miv(config);
    else if (config.subcommand == "simulate")
      doc = run_simulate(config);
    else
      throw ConfigError("bad_subcommand", "unknown subcommand '" + config.subcommand + "'");

    if (!config.output_path.empty())
      save_document(config.output_path, doc);
    else
      write_document(std::cout, doc);
    return kOk;
  } catch (const ConfigError& e) {
    return fail(e.code(), "cli.config", e.what(), kConfigError);
  } catch (const CsvError& e) {
    return fail(e.code(), "cli.ingest", e.what(), kDataError);
  } catch (const InfeasibleError& e) {
    return fail("infeasible", config.subcommand, e.what(), kInfeasible);
  } catch (const NumericalError& e) {
    return fail("numerical", config.subcommand, e.what(), kNumericalError);
  } catch (const std::invalid_argument& e) {
    return fail("invalid_input", config.subcommand, e.what(), kConfigError);
  } catch (const std::exception& e) {
    return fail("internal", config.subcommand, e.what(), kNumericalError);
  }
}

}  // namespace robustbayes::cli
