#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors_cli.hpp"

namespace robustbayes::cli {

namespace {

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_binary(const std::string& field, const char* name, const char* code, int line) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw CsvError(code, std::string(name) + " must be 0 or 1, got '" + field + "' on line " +
                           std::to_string(line));
}

}  // namespace

std::vector<Observation> ingest_late_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("unreadable_file", "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw CsvError("missing_columns", path + " is empty; expected header y,d,z");
  {
    std::string header = strip(line);
    for (auto& c : header)
      if (c == ' ' || c == '\t') c = '\0';
    if (strip(header) != "y,d,z")
      throw CsvError("missing_columns", path + ": header must be y,d,z (got '" + strip(line) + "')");
  }

  std::vector<Observation> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = strip(line);
    if (row.empty()) continue;

    std::stringstream ss(row);
    std::string fy, fd, fz, extra;
    if (!std::getline(ss, fy, ',') || !std::getline(ss, fd, ',') || !std::getline(ss, fz, ','))
      throw CsvError("missing_columns", "line " + std::to_string(line_no) + ": expected 3 fields");
    if (std::getline(ss, extra, ','))
      throw CsvError("missing_columns", "line " + std::to_string(line_no) + ": too many fields");

    Observation rec;
    try {
      std::size_t used = 0;
      rec.y = std::stod(strip(fy), &used);
      if (used != strip(fy).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw CsvError("bad_outcome",
                     "line " + std::to_string(line_no) + ": outcome '" + strip(fy) + "' is not a number");
    }
    if (!std::isfinite(rec.y))
      throw CsvError("bad_outcome", "line " + std::to_string(line_no) + ": outcome is not finite");
    rec.d = parse_binary(strip(fd), "d", "non_binary_treatment", line_no);
    rec.z = parse_binary(strip(fz), "z", "non_binary_instrument", line_no);
    records.push_back(rec);
  }
  return records;
}

void write_late_csv(const std::string& path, const std::vector<Observation>& records) {
  std::ofstream out(path);
  if (!out) throw CsvError("unreadable_file", "cannot write " + path);
  out << "y,d,z\n";
  char buf[64];
  for (const auto& rec : records) {
    std::snprintf(buf, sizeof(buf), "%.10g", rec.y);
    out << buf << ',' << rec.d << ',' << rec.z << '\n';
  }
}

}  // namespace robustbayes::cli
