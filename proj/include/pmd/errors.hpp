// Error taxonomy. InvalidInput marks caller contract violations, DomainError
// marks evaluations outside an effective domain (it drives the
// DomainViolation run outcome rather than crashing), ConfigError marks
// experiment configuration problems, UnsupportedInstance marks oracle limits.
#pragma once

#include <stdexcept>

namespace pmd {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pmd
