#pragma once

#include <stdexcept>
#include <string>

namespace fssm {

// Invalid argument values (non-positive shapes, out-of-range probabilities, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatches between panels, bases and parameter blocks.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid run configuration; message names the offending entry.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// File or stream failures.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or diverged numerics inside a sampler sweep.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested tolerance not met within the evaluation budget; carries the best
// estimate so the caller can decide whether to accept it.
struct AccuracyError : std::runtime_error {
  AccuracyError(const std::string& msg, double estimate, double error_estimate)
      : std::runtime_error(msg), best_estimate(estimate), abs_error(error_estimate) {}
  double best_estimate;
  double abs_error;
};

}  // namespace fssm
