#ifndef ROBUSTBAYES_TOOLS_RESULTDOC_HPP
#define ROBUSTBAYES_TOOLS_RESULTDOC_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace robustbayes::cli {

// Flat structured text document: top-level `key = value` lines followed by
// bracketed sections of `key = value` lines. Writing then parsing reproduces
// the document exactly.
struct Document {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void set_header(const std::string& key, const std::string& value);
  // Empty string when absent.
  std::string get(const std::string& section, const std::string& key) const;

  bool operator==(const Document& other) const = default;
};

std::string format_double(double v);  // shortest round-trip decimal

void write_document(std::ostream& out, const Document& doc);
Document parse_document(std::istream& in);

void save_document(const std::string& path, const Document& doc);
Document load_document(const std::string& path);

}  // namespace robustbayes::cli

#endif
