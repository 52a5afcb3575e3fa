#include <string>

#include "CLI11.hpp"
#include "lib/commands.hpp"
#include "lib/config.hpp"
#include "lib/errors_cli.hpp"

using robustbayes::cli::RunConfig;

namespace {

// Flag values are staged here; only flags the user actually passed override
// the config file.
struct FlagValues {
  std::string data, config, out, traces, prior, metric;
  int draws = 0, grid_k = 0, threads = 0, goods = 0, mc_samples = 0, z0 = 0, n = 0;
  std::uint64_t seed = 0;
  double alpha = 0, m = 0, delta_m = 0, box_lo = 0, box_hi = 0;
  double defiers = 0, always = 0, never = 0, effect = 0, pr_z1 = 0;
  std::string z_list, upper_list, lower_list, probs_list;
  bool no_standardize = false, debug = false;
};

void add_common_flags(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--data", f.data, "input (or simulate output) CSV path");
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--out", f.out, "result document path (stdout when omitted)");
  cmd->add_option("--traces", f.traces, "prefix for two-column trace files");
  cmd->add_option("--draws", f.draws, "posterior draws");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--alpha", f.alpha, "credible level complement");
  cmd->add_option("--prior", f.prior, "pointmass | uniform | gauss | giveup");
  cmd->add_option("--grid-k", f.grid_k, "outcome grid bins");
  cmd->add_option("--threads", f.threads, "worker threads for per-draw bounds");
  cmd->add_flag("--no-standardize", f.no_standardize, "keep the outcome on its raw scale");
  cmd->add_flag("--debug", f.debug, "extra diagnostics (both defier-mass weightings)");
}

void merge_flags(const CLI::App* cmd, const FlagValues& f, RunConfig& config) {
  const auto set = [&](const char* name) { return cmd->count(name) > 0; };
  if (set("--data")) config.data_path = f.data;
  if (set("--out")) config.output_path = f.out;
  if (set("--traces")) config.traces_prefix = f.traces;
  if (set("--draws")) config.draws = f.draws;
  if (set("--seed")) config.seed = f.seed;
  if (set("--alpha")) config.alpha = f.alpha;
  if (set("--prior")) config.prior = f.prior;
  if (set("--grid-k")) config.grid_k = f.grid_k;
  if (set("--threads")) config.threads = f.threads;
  if (set("--no-standardize")) config.standardize = false;
  if (set("--debug")) config.debug = true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust Bayesian bounds for partially identified models"};
  app.require_subcommand(1);

  FlagValues f;
  auto* late = app.add_subcommand("late", "treatment-effect bounds from y,d,z data");
  auto* intersection = app.add_subcommand("intersection", "intersection-bounds model");
  auto* choice = app.add_subcommand("choice", "discrete-choice mean-utility bounds");
  auto* miv = app.add_subcommand("miv", "monotone-instrument bounds");
  auto* simulate = app.add_subcommand("simulate", "write synthetic potential-outcome data");

  for (auto* cmd : {late, intersection, choice, miv, simulate}) add_common_flags(cmd, f);

  intersection->add_option("--m", f.m, "deviation budget");
  intersection->add_option("--z", f.z_list, "instrument grid (comma list)");
  intersection->add_option("--mean-upper", f.upper_list, "upper-bound means (comma list)");
  intersection->add_option("--mean-lower", f.lower_list, "lower-bound means (comma list)");

  choice->add_option("--m", f.m, "chi-squared divergence budget");
  choice->add_option("--goods", f.goods, "number of inside goods J");
  choice->add_option("--probs", f.probs_list, "choice probabilities, z=1 block then z=0 block");
  choice->add_option("--mc-samples", f.mc_samples, "Monte Carlo shock draws");
  choice->add_option("--box-lo", f.box_lo, "utility search box lower edge");
  choice->add_option("--box-hi", f.box_hi, "utility search box upper edge");

  miv->add_option("--delta-m", f.delta_m, "deviation slack above the minimum");
  miv->add_option("--z0", f.z0, "target instrument index");
  miv->add_option("--metric", f.metric, "left | right | union");
  miv->add_option("--z", f.z_list, "instrument grid (comma list)");
  miv->add_option("--h-upper", f.upper_list, "upper envelope (comma list)");
  miv->add_option("--h-lower", f.lower_list, "lower envelope (comma list)");

  simulate->add_option("--n", f.n, "rows to generate");
  simulate->add_option("--defiers", f.defiers, "defier share");
  simulate->add_option("--always", f.always, "always-taker share");
  simulate->add_option("--never", f.never, "never-taker share");
  simulate->add_option("--effect", f.effect, "treatment effect");
  simulate->add_option("--pr-z1", f.pr_z1, "instrument probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : robustbayes::cli::kConfigError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  RunConfig config;
  config.subcommand = cmd->get_name();

  try {
    if (cmd->count("--config") > 0) robustbayes::cli::load_config_file(f.config, config);
    merge_flags(cmd, f, config);

    using robustbayes::cli::parse_double_list;
    if (config.subcommand == "intersection") {
      if (cmd->count("--m")) config.ix_m = f.m;
      if (cmd->count("--z")) config.ix_z = parse_double_list(f.z_list);
      if (cmd->count("--mean-upper")) config.ix_mean_upper = parse_double_list(f.upper_list);
      if (cmd->count("--mean-lower")) config.ix_mean_lower = parse_double_list(f.lower_list);
    } else if (config.subcommand == "choice") {
      if (cmd->count("--m")) config.ch_m = f.m;
      if (cmd->count("--goods")) config.ch_goods = f.goods;
      if (cmd->count("--probs")) config.ch_probs = parse_double_list(f.probs_list);
      if (cmd->count("--mc-samples")) config.ch_mc_samples = f.mc_samples;
      if (cmd->count("--box-lo")) config.ch_box_lo = f.box_lo;
      if (cmd->count("--box-hi")) config.ch_box_hi = f.box_hi;
    } else if (config.subcommand == "miv") {
      if (cmd->count("--delta-m")) config.miv_delta_m = f.delta_m;
      if (cmd->count("--z0")) config.miv_z0 = f.z0;
      if (cmd->count("--metric")) config.miv_metric = f.metric;
      if (cmd->count("--z")) config.miv_z = parse_double_list(f.z_list);
      if (cmd->count("--h-upper")) config.miv_h_upper = parse_double_list(f.upper_list);
      if (cmd->count("--h-lower")) config.miv_h_lower = parse_double_list(f.lower_list);
    } else if (config.subcommand == "simulate") {
      if (cmd->count("--n")) config.sim_n = f.n;
      if (cmd->count("--defiers")) config.sim_defier_share = f.defiers;
      if (cmd->count("--always")) config.sim_always_share = f.always;
      if (cmd->count("--never")) config.sim_never_share = f.never;
      if (cmd->count("--effect")) config.sim_effect = f.effect;
      if (cmd->count("--pr-z1")) config.sim_pr_z1 = f.pr_z1;
    }
  } catch (const robustbayes::cli::ConfigError& e) {
    std::fprintf(stderr, "error (%s): %s\n", e.code().c_str(), e.what());
    return robustbayes::cli::kConfigError;
  }

  return robustbayes::cli::run_subcommand(config);
}
