#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fcdc {

/// Input outside the physical or mathematical domain of a model.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Invalid or unsupported configuration (bit widths, fixtures, strategies).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ConfigIssue {
  int line = 0;  // 1-based, 0 when unknown
  std::string message;
};

/// Schema validation failure carrying every issue found in one pass.
class SchemaError : public ConfigError {
public:
  explicit SchemaError(std::vector<ConfigIssue> issues)
      : ConfigError(summarize(issues)), issues_(std::move(issues)) {}

  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
  static std::string summarize(const std::vector<ConfigIssue>& issues) {
    std::string s = "configuration invalid:";
    for (const auto& i : issues) {
      s += "\n  ";
      if (i.line > 0) s += "line " + std::to_string(i.line) + ": ";
      s += i.message;
    }
    return s;
  }

  std::vector<ConfigIssue> issues_;
};

}  // namespace fcdc
