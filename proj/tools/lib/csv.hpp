#ifndef ROBUSTBAYES_TOOLS_CSV_HPP
#define ROBUSTBAYES_TOOLS_CSV_HPP

#include <string>
#include <vector>

#include "robustbayes/dpmm.hpp"

namespace robustbayes::cli {

// Reads a `y,d,z` CSV (decimal outcome, binary treatment and instrument,
// LF or CRLF line endings). Any malformed row is an error naming its line.
// Error codes: unreadable_file, missing_columns, bad_outcome,
// non_binary_treatment, non_binary_instrument.
std::vector<Observation> ingest_late_csv(const std::string& path);

void write_late_csv(const std::string& path, const std::vector<Observation>& records);

}  // namespace robustbayes::cli

#endif
