#pragma once

#include <stdexcept>
#include <string>

namespace fluidlob {

/// Invalid model or experiment parameters. `key` names the offending field
/// (a JSON pointer when the value came from a config file).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A function was evaluated outside its domain (e.g. zero workload).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fluid workload fell below the configured floor.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Richardson half-step check exceeded its tolerance, or a component went
/// negative beyond round-off.
class StepInstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The equilibrium scan found no sign change of the workload balance.
class NoBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fluidlob
