#pragma once

#include <stdexcept>
#include <string>

namespace memdd {

// Shape/dimension disagreement between arrays. Messages name both shapes.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument value (empty sequence, lo >= hi, segment too short, ...).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inconsistent or incomplete configuration (bad kind/variant combo,
// missing kind-specific complexity field, checkpoint/dataset mismatch).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries a human-readable location in the message.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation invoked before required state was established (e.g. a
// normalizer applied before fitting).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Non-finite loss or gradient, or other numeric breakdown.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace memdd
