#pragma once

#include <stdexcept>
#include <string>

namespace sarsim {

// Invalid or unparsable configuration. key() names the offending entry when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Argument outside the domain of a closed-form expression (log of a value <= 1, etc.).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller broke an operation precondition (too few trials, bad record length, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sarsim
