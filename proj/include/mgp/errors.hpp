#pragma once

#include <stdexcept>
#include <string>

namespace mgp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kernel matrix stayed indefinite after the jitter escalation cap.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// An input handed to grad() is not reachable from the output node.
struct UntrackedInput : Error {
  using Error::Error;
};

struct NonFiniteValue : Error {
  using Error::Error;
};

// Training loss became NaN/Inf; carries the last snapshot iteration.
struct NonFiniteLoss : Error {
  NonFiniteLoss(const std::string& msg, long iteration)
      : Error(msg), iteration(iteration) {}
  long iteration;
};

struct ParseError : Error {
  using Error::Error;
};

struct NonNumericColumn : Error {
  using Error::Error;
};

struct UnsupportedDimension : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace mgp
