#pragma once

#include <stdexcept>
#include <string>

namespace algosim {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad numeric argument to a pure function (probability outside (0,1), zero votes, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EligibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid scenario configuration; `field` names the offending key.
struct ConfigError : std::runtime_error {
  ConfigError(std::string field_name, const std::string& what)
      : std::runtime_error(field_name + ": " + what), field(std::move(field_name)) {}
  std::string field;
};

// Internal invariant broken during a run (event in the past, bandwidth overrun, ...).
struct InvariantViolation : std::logic_error {
  InvariantViolation(std::string invariant_name, const std::string& what)
      : std::logic_error(invariant_name + ": " + what), invariant(std::move(invariant_name)) {}
  std::string invariant;
};

}  // namespace algosim
