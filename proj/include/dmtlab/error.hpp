#pragma once

#include <stdexcept>
#include <string>

namespace dmtlab {

/// Malformed input: bad network file, invalid curve, schedule violation.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed input for which the requested construction does not exist
/// (e.g. a full-duplex linear protocol on a network with cycles and
/// shortcuts, or an enumeration that would be exponential).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dmtlab
