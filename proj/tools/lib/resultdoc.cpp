#include "resultdoc.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
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

}  // namespace

void Document::set(const std::string& section, const std::string& key, const std::string& value) {
  for (auto& [name, entries] : sections) {
    if (name == section) {
      for (auto& [k, v] : entries) {
        if (k == key) {
          v = value;
          return;
        }
      }
      entries.emplace_back(key, value);
      return;
    }
  }
  sections.push_back({section, {{key, value}}});
}

void Document::set_header(const std::string& key, const std::string& value) {
  for (auto& [k, v] : header) {
    if (k == key) {
      v = value;
      return;
    }
  }
  header.emplace_back(key, value);
}

std::string Document::get(const std::string& section, const std::string& key) const {
  if (section.empty()) {
    for (const auto& [k, v] : header)
      if (k == key) return v;
    return "";
  }
  for (const auto& [name, entries] : sections) {
    if (name != section) continue;
    for (const auto& [k, v] : entries)
      if (k == key) return v;
  }
  return "";
}

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_document(std::ostream& out, const Document& doc) {
  for (const auto& [k, v] : doc.header) out << k << " = " << v << '\n';
  for (const auto& [name, entries] : doc.sections) {
    out << '[' << name << "]\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  }
}

Document parse_document(std::istream& in) {
  Document doc;
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    const std::string s = strip(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("bad_document", "unterminated section header: " + s);
      section = s.substr(1, s.size() - 2);
      doc.sections.push_back({section, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("bad_document", "expected key = value, got: " + s);
    const std::string key = strip(s.substr(0, eq));
    const std::string value = strip(s.substr(eq + 1));
    if (section.empty())
      doc.header.emplace_back(key, value);
    else
      doc.sections.back().second.emplace_back(key, value);
  }
  return doc;
}

void save_document(const std::string& path, const Document& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("unwritable_output", "cannot write " + path);
  write_document(out, doc);
}

Document load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("unreadable_file", "cannot open " + path);
  return parse_document(in);
}

}  // namespace robustbayes::cli
