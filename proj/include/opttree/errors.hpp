#pragma once

#include <stdexcept>
#include <string>

namespace opttree {

// Bad input at an API boundary: malformed files, out-of-range feature
// indices, invalid budgets.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wall clock budget spent before the search finished.
class TimeoutError : public std::runtime_error {
 public:
  TimeoutError() : std::runtime_error("time limit reached") {}
};

// A broken internal invariant. Indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace opttree
