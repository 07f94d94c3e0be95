#pragma once

#include <stdexcept>
#include <string>

namespace augbench {

// Base for every error the library raises. The CLI maps these to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (layer counts, ranges, hyperparameters).
struct ConfigError : Error {
  using Error::Error;
};

// Data that violates a documented invariant (labels, pixel ranges, sizes).
struct ValidationError : Error {
  using Error::Error;
};

// Filesystem and codec failures.
struct IoError : Error {
  using Error::Error;
};

// Optimisation diverged (non-finite loss).
struct TrainingError : Error {
  using Error::Error;
};

}  // namespace augbench
