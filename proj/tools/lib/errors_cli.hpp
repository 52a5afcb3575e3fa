#ifndef ROBUSTBAYES_TOOLS_ERRORS_CLI_HPP
#define ROBUSTBAYES_TOOLS_ERRORS_CLI_HPP

#include <stdexcept>
#include <string>

namespace robustbayes::cli {

// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure,
// 5 infeasible model.
enum ExitCode {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kNumericalError = 4,
  kInfeasible = 5,
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class CsvError : public std::runtime_error {
 public:
  CsvError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace robustbayes::cli

#endif
