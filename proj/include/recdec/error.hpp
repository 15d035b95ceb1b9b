#pragma once

#include <stdexcept>
#include <string>

namespace recdec {

/// Error type for all contract violations: bad input data, malformed files,
/// invalid configurations, and decode failures.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace recdec
