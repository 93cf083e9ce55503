#pragma once

#include <stdexcept>
#include <string>

namespace jointtag {

// Bad input data: malformed corpus lines, unknown relations, bad tag text.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gold annotation places one token in two entity mentions.
class OverlappingEntities : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Shapes that disagree with the hyperparameters.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf in a loss or gradient.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or option value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jointtag
