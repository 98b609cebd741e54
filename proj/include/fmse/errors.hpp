#pragma once

#include <stdexcept>
#include <string>

namespace fmse {

/// Invalid configuration, schema violation, or malformed input file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The discrete direct problem is (numerically) singular, i.e. the standing
/// assumption that 0 is not an eigenvalue of the interior operator fails.
class WellPosednessError : public std::runtime_error {
 public:
  explicit WellPosednessError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fmse
