#pragma once

#include <stdexcept>
#include <string>

namespace arbiter {

// Malformed input bytes (JSON, APX, embedding rows, config lines).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input parsed but violates a data-model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mixed-stance argument group without a strict majority.
class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration exceeded its extension-count or wall-clock budget.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between features and model parameters.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite activation, loss or parameter during training/inference.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arbiter
