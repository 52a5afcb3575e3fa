#ifndef ROBUSTBAYES_TOOLS_CONFIG_HPP
#define ROBUSTBAYES_TOOLS_CONFIG_HPP

#include <string>
#include <vector>

#include "commands.hpp"
#include "resultdoc.hpp"

namespace robustbayes::cli {

std::vector<double> parse_double_list(const std::string& text);

// Applies the key = value pairs of a config document onto the run
// configuration. Unknown keys are an error.
void apply_config_document(const Document& doc, RunConfig& config);

void load_config_file(const std::string& path, RunConfig& config);

}  // namespace robustbayes::cli

#endif
