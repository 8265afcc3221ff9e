#pragma once

#include <stdexcept>
#include <string>

namespace dlad {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor/model dimension disagreements.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid argument values (non-stochastic rows, nonpositive weights, ...).
struct ValueError : Error {
  using Error::Error;
};

// Malformed file contents (IDX magic, truncation, checkpoint version, ...).
struct FormatError : Error {
  using Error::Error;
};

// Inconsistent or out-of-range data (count mismatch, label out of range).
struct DataError : Error {
  using Error::Error;
};

// Config file problems; message carries the offending line where known.
struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Non-finite or exploding loss; remembers the epoch that tripped the guard.
struct TrainingDiverged : Error {
  TrainingDiverged(const std::string& what, int epoch_index)
      : Error(what), epoch(epoch_index) {}
  int epoch;
};

}  // namespace dlad
