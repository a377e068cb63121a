#pragma once

#include <stdexcept>
#include <string>

namespace patmark {

// Invalid user-supplied configuration (bad pattern string, bad thresholds, ...).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed or out-of-contract input data (corpus records, token ids, ...).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// An edit plan that cannot be applied or packed into the sequence.
class PlanError : public std::runtime_error {
public:
  explicit PlanError(const std::string& msg) : std::runtime_error(msg) {}
};

// Hard-mode generation with an empty target subset, and similar dead ends.
class GenerationError : public std::runtime_error {
public:
  explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Threshold calibration could not meet the requested target.
class CalibrationError : public std::runtime_error {
public:
  explicit CalibrationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A closed-form bound was queried outside its applicability region.
class BoundError : public std::invalid_argument {
public:
  explicit BoundError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace patmark
