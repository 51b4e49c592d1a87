#pragma once

#include <stdexcept>
#include <string>

namespace causalx {

// Malformed input data or configuration. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while computing (non-finite loss, IO failure mid-run). Exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace causalx
