#pragma once

#include <stdexcept>
#include <string>

namespace rtfnet {

// Invalid caller input: bad shapes, out-of-range parameters, bad flags.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent data on disk or in memory.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values, singular systems, degenerate denominators.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured size or iteration budget was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rtfnet
