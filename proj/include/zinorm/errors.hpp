#pragma once

#include <stdexcept>
#include <string>

namespace zinorm {

/// Malformed or inconsistent input data. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An indicator cannot be computed on otherwise valid data (zero
/// proportions, all-or-none mentioning). Maps to CLI exit code 3.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zinorm
