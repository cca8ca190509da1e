#pragma once

#include <stdexcept>
#include <string>

namespace evsched {

/// Input documents or parameters that break a stated invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A key that is not present in a cost table or id map.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A caller broke a precondition (programming error, not bad input).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace evsched
