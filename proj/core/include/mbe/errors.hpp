#pragma once

#include <stdexcept>
#include <string>

namespace mbe {

// Malformed input, broken dataset invariants, unknown labels.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values, shape mismatches, divergence.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mbe
