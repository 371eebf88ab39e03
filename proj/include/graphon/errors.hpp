#pragma once

#include <stdexcept>
#include <string>

namespace graphon {

/// Invalid experiment configuration. `line` is 0 when the problem is not tied
/// to a specific line of the config file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message, int line = 0)
      : std::runtime_error(format(field, message, line)), field_(field), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message,
                            int line) {
    std::string out = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
    if (!field.empty()) out += field + ": ";
    return out + message;
  }

  std::string field_;
  int line_;
};

/// Integration or linear-algebra failure (non-finite state, no convergence).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& message, double time = 0.0)
      : std::runtime_error(message), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace graphon
