#pragma once

#include <stdexcept>
#include <string>

namespace pitchfield {

/// Raised for invalid inputs and violated preconditions. The message is the
/// stable, user-facing part of the contract ("empty input", "invalid hop", ...).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pitchfield
