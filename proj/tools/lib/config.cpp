#include "config.hpp"

#include <sstream>
#include <stdexcept>

#include "errors_cli.hpp"

namespace robustbayes::cli {

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad_value", key + ": '" + value + "' is not a number");
  }
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) throw ConfigError("bad_value", key + ": expected an integer");
  return i;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad_value", key + ": expected true or false");
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field.empty()) continue;
    out.push_back(to_double("list", field));
  }
  return out;
}

void apply_config_document(const Document& doc, RunConfig& config) {
  const auto apply = [&](const std::string& section, const std::string& key,
                         const std::string& value) {
    const std::string full = section + "." + key;
    if (section == "run") {
      if (key == "data") config.data_path = value;
      else if (key == "out") config.output_path = value;
      else if (key == "traces") config.traces_prefix = value;
      else if (key == "draws") config.draws = to_int(full, value);
      else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_double(full, value));
      else if (key == "alpha") config.alpha = to_double(full, value);
      else if (key == "grid_k") config.grid_k = to_int(full, value);
      else if (key == "prior") config.prior = value;
      else if (key == "threads") config.threads = to_int(full, value);
      else if (key == "standardize") config.standardize = to_bool(full, value);
      else if (key == "debug") config.debug = to_bool(full, value);
      else throw ConfigError("unknown_key", "unknown config key " + full);
    } else if (section == "dpmm") {
      if (key == "base_mean") config.dpmm.base_mean = to_double(full, value);
      else if (key == "base_sd") config.dpmm.base_sd = to_double(full, value);
      else if (key == "gamma_shape") config.dpmm.gamma_shape = to_double(full, value);
      else if (key == "gamma_rate") config.dpmm.gamma_rate = to_double(full, value);
      else if (key == "concentration") config.dpmm.concentration = to_double(full, value);
      else if (key == "truncation") config.dpmm.truncation_level = to_int(full, value);
      else if (key == "burn_in") config.dpmm.burn_in = to_int(full, value);
      else if (key == "thinning") config.dpmm.thinning = to_int(full, value);
      else if (key == "pseudo_00") config.dpmm.dz_pseudocounts[cell_index(0, 0)] = to_double(full, value);
      else if (key == "pseudo_10") config.dpmm.dz_pseudocounts[cell_index(1, 0)] = to_double(full, value);
      else if (key == "pseudo_01") config.dpmm.dz_pseudocounts[cell_index(0, 1)] = to_double(full, value);
      else if (key == "pseudo_11") config.dpmm.dz_pseudocounts[cell_index(1, 1)] = to_double(full, value);
      else throw ConfigError("unknown_key", "unknown config key " + full);
    } else if (section == "intersection") {
      if (key == "z") config.ix_z = parse_double_list(value);
      else if (key == "mean_upper") config.ix_mean_upper = parse_double_list(value);
      else if (key == "mean_lower") config.ix_mean_lower = parse_double_list(value);
      else if (key == "m") config.ix_m = to_double(full, value);
      else throw ConfigError("unknown_key", "unknown config key " + full);
    } else if (section == "choice") {
      if (key == "goods") config.ch_goods = to_int(full, value);
      else if (key == "probs") config.ch_probs = parse_double_list(value);
      else if (key == "m") config.ch_m = to_double(full, value);
      else if (key == "mc_samples") config.ch_mc_samples = to_int(full, value);
      else if (key == "box_lo") config.ch_box_lo = to_double(full, value);
      else if (key == "box_hi") config.ch_box_hi = to_double(full, value);
      else throw ConfigError("unknown_key", "unknown config key " + full);
    } else if (section == "miv") {
      if (key == "z") config.miv_z = parse_double_list(value);
      else if (key == "h_upper") config.miv_h_upper = parse_double_list(value);
      else if (key == "h_lower") config.miv_h_lower = parse_double_list(value);
      else if (key == "z0") config.miv_z0 = to_int(full, value);
      else if (key == "delta_m") config.miv_delta_m = to_double(full, value);
      else if (key == "metric") config.miv_metric = value;
      else throw ConfigError("unknown_key", "unknown config key " + full);
    } else if (section == "simulate") {
      if (key == "n") config.sim_n = to_int(full, value);
      else if (key == "defier_share") config.sim_defier_share = to_double(full, value);
      else if (key == "always_share") config.sim_always_share = to_double(full, value);
      else if (key == "never_share") config.sim_never_share = to_double(full, value);
      else if (key == "effect") config.sim_effect = to_double(full, value);
      else if (key == "pr_z1") config.sim_pr_z1 = to_double(full, value);
      else throw ConfigError("unknown_key", "unknown config key " + full);
    } else {
      throw ConfigError("unknown_section", "unknown config section [" + section + "]");
    }
  };

  for (const auto& [k, v] : doc.header) apply("run", k, v);
  for (const auto& [section, entries] : doc.sections)
    for (const auto& [k, v] : entries) apply(section, k, v);
}

void load_config_file(const std::string& path, RunConfig& config) {
  apply_config_document(load_document(path), config);
}

}  // namespace robustbayes::cli
