#pragma once

#include <stdexcept>
#include <string>

namespace cdmacap {

/// Argument outside the mathematical domain of a function (non-positive
/// distance, x <= 0 for a density, a path count where a moment diverges).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration: bad counts, unparseable files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampled estimate could not be formed (e.g. no user of one tier drawn),
/// or a quantity was requested before the data it depends on exists.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdmacap
