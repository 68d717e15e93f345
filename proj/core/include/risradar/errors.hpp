#pragma once

#include <stdexcept>
#include <string>

namespace risradar {

/// Invalid or inconsistent configuration (bad field values, schema violations).
/// Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension mismatch or malformed data files. Maps to CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Unrecoverable failure inside the training loop. Maps to CLI exit code 4.
class TrainError : public std::runtime_error {
 public:
  explicit TrainError(const std::string& what) : std::runtime_error(what) {}
};

/// Eigensolver failed to converge within the sweep cap.
class EigError : public std::runtime_error {
 public:
  EigError(const std::string& what, double residual)
      : std::runtime_error(what), off_diagonal_residual(residual) {}
  double off_diagonal_residual;
};

}  // namespace risradar
