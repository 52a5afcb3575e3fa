#ifndef ROBUSTBAYES_TOOLS_COMMANDS_HPP
#define ROBUSTBAYES_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "robustbayes/dpmm.hpp"

namespace robustbayes::cli {

// Fully resolved run configuration (defaults, then config file, then flags).
struct RunConfig {
  std::string subcommand;

  std::string data_path;
  std::string config_path;
  std::string output_path;
  std::string traces_prefix;

  int draws = 500;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  int grid_k = 200;
  std::string prior = "gauss";  // pointmass | uniform | gauss | giveup
  int threads = 1;
  bool standardize = true;
  bool debug = false;

  DPMMConfig dpmm;

  // intersection
  std::vector<double> ix_z, ix_mean_upper, ix_mean_lower;
  double ix_m = 0.0;

  // choice
  int ch_goods = 2;
  std::vector<double> ch_probs;
  double ch_m = 0.05;
  int ch_mc_samples = 100000;
  double ch_box_lo = -4.0, ch_box_hi = 4.0;

  // miv
  std::vector<double> miv_z, miv_h_upper, miv_h_lower;
  int miv_z0 = 0;
  double miv_delta_m = 0.1;
  std::string miv_metric = "left";  // left | right | union

  // simulate
  int sim_n = 2000;
  double sim_defier_share = 0.0;
  double sim_always_share = 0.2;
  double sim_never_share = 0.2;
  double sim_effect = 1.0;
  double sim_pr_z1 = 0.5;

  void validate() const;  // throws ConfigError
};

// Executes the subcommand, writes the result document (or a machine-readable
// error document) to output_path, and returns the process exit code.
int run_subcommand(const RunConfig& config);

// Synthetic potential-outcome sampler behind the `simulate` subcommand.
std::vector<Observation> simulate_records(const RunConfig& config);

}  // namespace robustbayes::cli

#endif
